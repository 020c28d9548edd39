#include "anafi/simd/dispatch.hpp"

#include "anafi/protocol/schema.hpp"

namespace anafi::simd {

using nlohmann::json;

namespace {

double num(const json& p, const char* key) { return p.at(key).get<double>(); }
int integer(const json& p, const char* key) { return static_cast<int>(p.at(key).get<double>()); }

Outcome download(Vehicle& v, bool delete_after) {
    std::vector<MediaRecord> records;
    Outcome o = v.storage_download(delete_after, records, kDownloadBudget);
    if (!o.ok) return o;
    json files = json::array();
    for (const auto& r : records) {
        files.push_back({{"media_id", r.id},
                         {"kind", r.kind},
                         {"format", r.format},
                         {"size", r.size},
                         {"stamp", r.stamp_ns},
                         {"data", protocol::base64_encode(media_bytes(r))}});
    }
    o.extras["files"] = std::move(files);
    return o;
}

}  // namespace

Outcome apply_command(Vehicle& v, std::string_view topic, const json& p) {
    if (topic == "drone/command") {
        return v.piloting({num(p, "roll"), num(p, "pitch"), num(p, "yaw"), num(p, "gaz")});
    }
    if (topic == "drone/moveby") return v.move_by({num(p, "dx"), num(p, "dy"), num(p, "dz"), num(p, "dyaw")});
    if (topic == "drone/moveto") {
        return v.move_to({num(p, "latitude"), num(p, "longitude"), num(p, "altitude"), num(p, "heading"),
                          integer(p, "orientation_mode")});
    }
    if (topic == "gimbal/command") {
        return v.gimbal_command({integer(p, "mode"), integer(p, "frame"), num(p, "roll"), num(p, "pitch"), num(p, "yaw")});
    }
    if (topic == "camera/command") return v.camera_command({integer(p, "mode"), num(p, "zoom")});
    if (topic == "skycontroller/command") {
        StickInput s;
        s.x = integer(p, "x");
        s.y = integer(p, "y");
        s.z = integer(p, "z");
        s.yaw = integer(p, "yaw");
        s.camera = integer(p, "camera");
        s.zoom = integer(p, "zoom");
        s.return_home = p.at("return_home").get<bool>();
        s.takeoff_land = p.at("takeoff_land").get<bool>();
        s.reset_camera = p.at("reset_camera").get<bool>();
        s.reset_zoom = p.at("reset_zoom").get<bool>();
        return v.sticks(s);
    }
    return Outcome::failure("unknown_channel", "not a command topic: " + std::string(topic));
}

Outcome call_service(Vehicle& v, std::string_view s, const json& p) {
    if (s == "drone/takeoff") return v.takeoff();
    if (s == "drone/land") return v.land();
    if (s == "drone/emergency") return v.emergency();
    if (s == "drone/halt") return v.halt();
    if (s == "drone/arm") return v.arm(p.at("data").get<bool>());
    if (s == "drone/calibrate") return v.calibrate();
    if (s == "drone/reboot") return v.reboot();
    if (s == "drone/rth") return v.rth();
    if (s == "home/navigate") return v.navigate_home(p.at("data").get<bool>());
    if (s == "home/set") return v.set_home({num(p, "latitude"), num(p, "longitude"), num(p, "altitude")});
    if (s == "skycontroller/offboard") return v.set_offboard(p.at("data").get<bool>());
    if (s == "camera/photo/take") {
        return v.photo_take({integer(p, "mode"), integer(p, "photo_format"), integer(p, "file_format")});
    }
    if (s == "camera/photo/stop") return v.photo_stop();
    if (s == "camera/recording/start") return v.recording_start(integer(p, "mode"));
    if (s == "camera/recording/stop") return v.recording_stop();
    if (s == "camera/reset") return v.camera_reset();
    if (s == "gimbal/reset") return v.gimbal_reset();
    if (s == "gimbal/calibrate") return v.gimbal_calibrate();
    if (s == "flightplan/upload") {
        const std::string uid = p.at("uid").get<std::string>();
        if (!p.contains("data")) {
            return Outcome::failure("missing_data", "the mission text must be sent in 'data'; 'file' is a client-side path");
        }
        return v.flightplan_upload(uid, p.at("data").get<std::string>());
    }
    if (s == "flightplan/start") return v.flightplan_start(p.at("uid").get<std::string>());
    if (s == "flightplan/pause") return v.flightplan_pause();
    if (s == "flightplan/stop") return v.flightplan_stop();
    if (s == "storage/download") return download(v, p.at("data").get<bool>());
    if (s == "storage/format") return v.storage_format();
    return Outcome::failure("unknown_channel", "not a drone service: " + std::string(s));
}

json reply_payload(const Outcome& o) {
    json out = o.extras.is_object() ? o.extras : json::object();
    out["success"] = o.ok;
    out["message"] = o.message;
    if (!o.code.empty()) out["code"] = o.code;
    return out;
}

std::optional<ParamValue> param_from_json(const json& value) {
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_number_float()) return value.get<double>();
    if (value.is_string()) return value.get<std::string>();
    return std::nullopt;
}

json param_to_json(const ParamValue& value) {
    return std::visit([](const auto& x) { return json(x); }, value);
}

}  // namespace anafi::simd
