#include "anafi/protocol/registry.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>

#include "anafi/parameters.hpp"

namespace anafi::protocol {

namespace {

using FT = FieldType;

Field boolean(std::string_view name, bool required = true) { return {name, FT::Bool, required}; }
Field number(std::string_view name, bool required = true) { return {name, FT::Float, required}; }
Field text(std::string_view name, bool required = true) { return {name, FT::String, required}; }
Field u64(std::string_view name, bool required = true) { return {name, FT::UInt64, required}; }

Field range(std::string_view name, std::int64_t lo, std::int64_t hi, bool required = true) {
    Field f{name, FT::Int, required};
    f.min = lo;
    f.max = hi;
    return f;
}

Field one_of(std::string_view name, std::vector<std::int64_t> set) {
    Field f{name, FT::Int};
    f.allowed = std::move(set);
    return f;
}

Field object(std::string_view name, const Schema& s, bool required = true) {
    Field f{name, FT::Object, required};
    f.nested = &s;
    return f;
}

Field list(std::string_view name, const Schema& s, bool required = true) {
    Field f{name, FT::ObjectList, required};
    f.nested = &s;
    return f;
}

Field floats(std::string_view name, std::size_t n) {
    Field f{name, FT::FloatArray};
    f.length = n;
    return f;
}

Field choice(std::string_view name, std::vector<std::string_view> set) {
    Field f{name, FT::String};
    f.choices = std::move(set);
    return f;
}

class Catalog {
public:
    Catalog() {
        const Schema& header = add({"Header", {u64("stamp"), text("frame_id")}});
        const Field hdr = object("header", header, false);
        const Schema& vector3 = add({"Vector3", {number("x"), number("y"), number("z")}});
        const Schema& quaternion = add({"Quaternion", {number("x"), number("y"), number("z"), number("w")}});
        const Schema& status = add({"NavSatStatus", {one_of("status", {-1, 0, 1, 2}), range("service", 0, 15)}});

        add({"Bool", {boolean("data")}});
        add({"UInt8", {range("data", 0, 255)}});
        add({"UInt16", {range("data", 0, 65535)}});
        add({"UInt64", {u64("data")}});
        add({"Float32", {number("data")}});
        add({"String", {text("data")}});
        add({"Time", {u64("data")}});
        add({"Vector3Stamped", {hdr, object("vector", vector3)}});
        add({"QuaternionStamped", {hdr, object("quaternion", quaternion)}});
        add({"NavSatFix",
             {hdr, object("status", status), number("latitude"), number("longitude"), number("altitude"),
              floats("position_covariance", 9), one_of("position_covariance_type", {0, 1, 2, 3})}});
        add({"CameraInfo",
             {hdr, range("height", 0, 1 << 16), range("width", 0, 1 << 16), text("distortion_model"), floats("d", 5),
              floats("k", 9), floats("r", 9), floats("p", 12)}});
        add({"Image",
             {hdr, range("height", 0, 1 << 16), range("width", 0, 1 << 16), choice("encoding", {"mono8", "rgb8"}),
              range("step", 0, 3 << 16), Field{"data", FT::Base64}}});
        add({"Location", {hdr, number("latitude"), number("longitude"), number("altitude")}});

        add({"CameraCommand", {hdr, one_of("mode", {0, 1}), number("zoom")}});
        add({"GimbalCommand",
             {hdr, one_of("mode", {0, 1}), one_of("frame", {0, 1, 2}), number("roll"), number("pitch"), number("yaw")}});
        add({"MoveByCommand", {hdr, number("dx"), number("dy"), number("dz"), number("dyaw")}});
        add({"MoveToCommand",
             {hdr, number("latitude"), number("longitude"), number("altitude"), number("heading"),
              one_of("orientation_mode", {0, 1, 2, 3})}});
        add({"PilotingCommand", {hdr, number("roll"), number("pitch"), number("yaw"), number("gaz")}});
        add({"SkycontrollerCommand",
             {hdr, range("x", -100, 100), range("y", -100, 100), range("z", -100, 100), range("yaw", -100, 100),
              range("camera", -100, 100), range("zoom", -100, 100), boolean("return_home"), boolean("takeoff_land"),
              boolean("reset_camera"), boolean("reset_zoom")}});

        // service requests
        add({"Trigger", {}});
        add({"SetBool", {boolean("data")}});
        add({"FlightPlan", {text("file", false), text("uid"), text("data", false)}});
        add({"srv/Location", {number("latitude"), number("longitude"), number("altitude")}});
        add({"Photo", {one_of("mode", {0, 1, 2, 3, 4}), one_of("photo_format", {0, 1}), one_of("file_format", {0, 1, 2})}});
        add({"Recording", {one_of("mode", {0, 1, 2, 3})}});
        add({"Hello", {text("client", false), text("version", false)}});

        // responses
        const Field success = boolean("success");
        const Field message = text("message");
        const Field code = text("code", false);
        add({"rep/Trigger", {success, message, code}});
        add({"rep/Media", {success, message, code, text("media_id", false)}});
        add({"rep/FlightPlan", {success, message, code, text("uid", false), u64("waypoints", false)}});
        const Schema& file = add({"MediaFile",
                                  {text("media_id"), choice("kind", {"photo", "video"}), text("format"), u64("size"),
                                   u64("stamp"), Field{"data", FT::Base64}}});
        add({"rep/Download", {success, message, code, u64("count", false), u64("remaining", false), list("files", file, false)}});
        add({"rep/Hello",
             {success, message, code, text("version"), u64("protocol"), text("name"), text("model"), number("tick_rate"),
              number("realtime_factor"), u64("epoch"), u64("sim_stamp")}});
        const Schema& entry = add({"FleetEntry", {text("name"), text("model"), range("port", 0, 65535)}});
        add({"rep/FleetInfo", {success, message, code, list("drones", entry)}});

        add({"param/Set", {Field{"value", FT::Scalar}}});
        add({"param/Value", {Field{"value", FT::Scalar}}});
        add({"Empty", {}});
        add({"Error", {text("code"), text("message")}});
    }

    const Schema& get(std::string_view name) const {
        const auto it = by_name_.find(name);
        if (it == by_name_.end()) throw std::out_of_range("unknown message type " + std::string(name));
        return *it->second;
    }

private:
    const Schema& add(Schema s) {
        storage_.push_back(std::move(s));
        by_name_.emplace(storage_.back().name, &storage_.back());
        return storage_.back();
    }

    std::deque<Schema> storage_;
    std::map<std::string_view, const Schema*, std::less<>> by_name_;
};

const Catalog& catalog() {
    static const Catalog c;
    return c;
}

// Rates marked false are not given in the published API and were chosen here.
const TopicInfo kPublished[] = {
    {"battery/health", "UInt8", 1, true, false, "battery health [%]"},
    {"battery/percentage", "UInt8", 30, true, false, "battery level [%]"},
    {"battery/voltage", "Float32", 1, true, false, "battery voltage [V]"},
    {"camera/awb_b_gain", "Float32", 30, true, false, "automatic white balance blue gain"},
    {"camera/awb_r_gain", "Float32", 30, true, false, "automatic white balance red gain"},
    {"camera/camera_info", "CameraInfo", 30, true, false, "main camera info"},
    {"camera/exposure_time", "Float32", 30, true, false, "exposure time [s]"},
    {"camera/hfov", "Float32", 30, true, false, "horizontal field of view [deg]"},
    {"camera/image", "Image", 30, true, false, "image from the main front camera"},
    {"camera/iso_gain", "UInt16", 30, true, false, "sensitivity gain"},
    {"camera/vfov", "Float32", 30, true, false, "vertical field of view [deg]"},
    {"camera/zoom", "Float32", 5, true, false, "zoom level [x]"},
    {"drone/altitude", "Float32", 30, true, false, "ground distance [m]"},
    {"drone/altitude_above_to", "Float32", 5, true, false, "height above the take-off point [m]"},
    {"drone/attitude", "QuaternionStamped", 30, true, false, "attitude in the north-west-up frame"},
    {"drone/gps/fix", "Bool", 1, true, false, "GPS fix"},
    {"drone/gps/location", "NavSatFix", 1, true, false, "GPS location"},
    {"drone/gps/satellites", "UInt8", 1, false, false, "number of GPS satellites"},
    {"drone/rpy", "Vector3Stamped", 30, true, false, "roll, pitch, yaw in the north-west-up frame [deg]"},
    {"drone/speed", "Vector3Stamped", 30, true, false, "velocity in the body frame [m/s]"},
    {"drone/state", "String", 30, true, false, "flight state"},
    {"gimbal/attitude/absolute", "QuaternionStamped", 5, true, false, "gimbal attitude in the north-west-up frame"},
    {"home/location", "Location", 1, false, false, "home location"},
    {"link/quality", "UInt8", 30, true, false, "link quality [0, 5]"},
    {"skycontroller/attitude", "QuaternionStamped", 20, true, false, "controller attitude"},
    {"skycontroller/command", "SkycontrollerCommand", 100, true, true, "controller sticks and buttons"},
    {"skycontroller/rpy", "Vector3Stamped", 20, true, false, "controller roll, pitch, yaw [deg]"},
    {"storage/available", "UInt64", 1, false, false, "available storage [B]"},
    {"time", "Time", 30, true, false, "drone time [ns]"},
};

const TopicInfo kSubscribed[] = {
    {"camera/command", "CameraCommand", 0, false, true, "zoom commands"},
    {"drone/command", "PilotingCommand", 0, false, true, "piloting commands"},
    {"drone/moveby", "MoveByCommand", 0, false, true, "relative move"},
    {"drone/moveto", "MoveToCommand", 0, false, true, "move to a location"},
    {"gimbal/command", "GimbalCommand", 0, false, true, "gimbal attitude commands"},
};

const ServiceInfo kServices[] = {
    {"camera/photo/stop", "Photo", "stop photo capture"},
    {"camera/photo/take", "Photo", "take a photo"},
    {"camera/recording/start", "Recording", "start video recording"},
    {"camera/recording/stop", "Recording", "stop video recording"},
    {"camera/reset", "Trigger", "reset zoom level"},
    {"drone/arm", "SetBool", "arm or disarm"},
    {"drone/calibrate", "Trigger", "magnetometer calibration"},
    {"drone/emergency", "Trigger", "cut out the motors"},
    {"drone/halt", "Trigger", "halt and hover"},
    {"drone/land", "Trigger", "land"},
    {"drone/reboot", "Trigger", "reboot"},
    {"drone/rth", "Trigger", "return home"},
    {"drone/takeoff", "Trigger", "take off"},
    {"flightplan/pause", "Trigger", "pause the flight plan"},
    {"flightplan/start", "FlightPlan", "start an uploaded flight plan"},
    {"flightplan/stop", "Trigger", "stop the flight plan"},
    {"flightplan/upload", "FlightPlan", "upload a mission file"},
    {"gimbal/calibrate", "Trigger", "gimbal calibration"},
    {"gimbal/reset", "Trigger", "reset the gimbal orientation"},
    {"home/navigate", "SetBool", "start or stop return home"},
    {"home/set", "Location", "set the custom home location"},
    {"skycontroller/offboard", "SetBool", "offboard or manual control"},
    {"storage/download", "SetBool", "download media, optionally deleting"},
    {"storage/format", "Trigger", "format storage"},
};

const ServiceInfo kPlumbing[] = {
    {"connection/hello", "Hello", "handshake: daemon version, drone name and model", true},
    {"fleet/info", "Trigger", "list the fleet", true},
};

template <typename T, std::size_t N>
const T* lookup(const T (&table)[N], std::string_view name) {
    const auto it = std::lower_bound(std::begin(table), std::end(table), name,
                                     [](const T& t, std::string_view n) { return t.name < n; });
    return it != std::end(table) && it->name == name ? &*it : nullptr;
}

}  // namespace

std::span<const TopicInfo> published_topics() { return kPublished; }
std::span<const TopicInfo> subscribed_topics() { return kSubscribed; }
std::span<const ServiceInfo> services() { return kServices; }
std::span<const ServiceInfo> plumbing_services() { return kPlumbing; }

const TopicInfo* find_published(std::string_view name) { return lookup(kPublished, name); }
const TopicInfo* find_subscribed(std::string_view name) { return lookup(kSubscribed, name); }

const ServiceInfo* find_service(std::string_view name) {
    if (const auto* s = lookup(kServices, name)) return s;
    for (const auto& p : kPlumbing) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

bool is_parameter(std::string_view name) { return find_param_spec(name) != nullptr; }

const Schema& message_schema(std::string_view type) { return catalog().get(type); }

const Schema& request_schema(const ServiceInfo& service) {
    if (service.type == "Location") return catalog().get("srv/Location");
    return catalog().get(service.type);
}

const Schema& response_schema(const ServiceInfo& service) {
    if (service.name == "storage/download") return catalog().get("rep/Download");
    if (service.name == "connection/hello") return catalog().get("rep/Hello");
    if (service.name == "fleet/info") return catalog().get("rep/FleetInfo");
    if (service.type == "Photo" || service.type == "Recording") return catalog().get("rep/Media");
    if (service.type == "FlightPlan") return catalog().get("rep/FlightPlan");
    return catalog().get("rep/Trigger");
}

const Schema& param_set_schema() { return catalog().get("param/Set"); }
const Schema& param_value_schema() { return catalog().get("param/Value"); }
const Schema& empty_schema() { return catalog().get("Empty"); }
const Schema& error_schema() { return catalog().get("Error"); }

}  // namespace anafi::protocol
