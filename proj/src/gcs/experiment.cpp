#include "anafi/gcs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace anafi::gcs {

using nlohmann::json;
using protocol::Envelope;
using protocol::Kind;

namespace {

constexpr std::uint64_t kSecond = 1'000'000'000ull;
constexpr double kSetupLead = 20.0;      // s from takeoff to the window
constexpr double kClimbAt = 5.0;         // s after takeoff
constexpr double kCommandPeriod = 0.05;  // s between piloting refreshes
constexpr double kLandingBudget = 60.0;  // s of sim time allowed for landing
constexpr double kMaxFactor = 1000.0;

struct SignalName {
    Signal signal;
    std::string_view name;
    std::string_view channel;
};

constexpr SignalName kSignals[] = {
    {Signal::Pitch, "pitch", "drone/command"},     {Signal::Roll, "roll", "drone/command"},
    {Signal::Yaw, "yaw", "drone/command"},         {Signal::Vertical, "vertical", "drone/command"},
    {Signal::Gimbal, "gimbal", "gimbal/command"},
};

std::uint64_t seconds_ns(double s) { return static_cast<std::uint64_t>(std::llround(s * 1e9)); }

double number(const json& j, const char* key, double fallback) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ExperimentError(std::string("experiment field '") + key + "' must be a number");
    return it->get<double>();
}

Segment parse_segment(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[1].is_number()) {
        throw ExperimentError("each segment is [value, seconds]");
    }
    Segment s;
    s.duration = j[1].get<double>();
    if (j[0].is_number()) {
        s.value = j[0].get<double>();
    } else if (j[0] == "max") {
        s.level = Segment::Level::RangeMax;
    } else if (j[0] == "min") {
        s.level = Segment::Level::RangeMin;
    } else {
        throw ExperimentError("segment value must be a number, \"max\" or \"min\"");
    }
    if (!(s.duration > 0) || !std::isfinite(s.duration)) throw ExperimentError("segment duration must be positive");
    return s;
}

json piloting(Signal signal, double v) {
    json p{{"roll", 0.0}, {"pitch", 0.0}, {"yaw", 0.0}, {"gaz", 0.0}};
    switch (signal) {
    case Signal::Pitch: p["pitch"] = v; break;
    case Signal::Roll: p["roll"] = v; break;
    case Signal::Yaw: p["yaw"] = v; break;
    case Signal::Vertical: p["gaz"] = v; break;
    case Signal::Gimbal: break;
    }
    return p;
}

Quaternion quaternion_of(const json& payload) {
    const json& q = payload.at("quaternion");
    return {q.at("w").get<double>(), q.at("x").get<double>(), q.at("y").get<double>(), q.at("z").get<double>()};
}

/// Telemetry gathered on the receive thread.
struct Capture {
    std::mutex mutex;
    std::condition_variable changed;
    struct Row {
        std::optional<json> rpy, speed, altitude;
    };
    std::map<std::uint64_t, Row> rows;
    std::vector<std::pair<std::uint64_t, Quaternion>> gimbal;
    std::vector<std::pair<std::uint64_t, std::string>> states;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;
};

}  // namespace

std::string_view to_string(Signal s) {
    for (const auto& n : kSignals) {
        if (n.signal == s) return n.name;
    }
    return "?";
}

double ExperimentSpec::duration() const {
    double total = 0.0;
    for (const auto& s : segments) total += s.duration;
    return total;
}

ExperimentSpec parse_experiment_spec(const json& doc) {
    if (!doc.is_object()) throw ExperimentError("experiment spec must be a JSON object");
    static const char* const known[] = {"name",    "signal",   "channel",     "amplitude", "hold",
                                        "rest",    "segments", "gimbal_mode", "gimbal_frame", "axis", "altitude"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known)) {
            throw ExperimentError("unknown experiment field '" + it.key() + "'");
        }
    }
    ExperimentSpec spec;
    spec.name = doc.value("name", std::string("experiment"));
    const std::string signal = doc.value("signal", std::string());
    const SignalName* found = nullptr;
    for (const auto& n : kSignals) {
        if (n.name == signal) found = &n;
    }
    if (!found) throw ExperimentError("unknown signal '" + signal + "' (pitch, roll, yaw, vertical, gimbal)");
    spec.signal = found->signal;
    spec.channel = doc.value("channel", std::string(found->channel));
    if (spec.channel != found->channel) {
        throw ExperimentError("signal " + signal + " is driven on " + std::string(found->channel) + ", not " +
                              spec.channel);
    }
    spec.altitude = number(doc, "altitude", spec.altitude);
    if (!(spec.altitude >= 2.0 && spec.altitude <= 100.0)) throw ExperimentError("altitude must be within [2, 100] m");
    const std::string mode = doc.value("gimbal_mode", std::string("position"));
    if (mode == "position") spec.gimbal_mode = 0;
    else if (mode == "velocity") spec.gimbal_mode = 1;
    else throw ExperimentError("gimbal_mode must be \"position\" or \"velocity\"");
    const std::string frame = doc.value("gimbal_frame", std::string("relative"));
    if (frame == "relative") spec.gimbal_frame = 1;
    else if (frame == "absolute") spec.gimbal_frame = 2;
    else throw ExperimentError("gimbal_frame must be \"relative\" or \"absolute\"");
    const std::string axis = doc.value("axis", std::string("pitch"));
    if (axis != "pitch" && axis != "roll") throw ExperimentError("axis must be \"pitch\" or \"roll\"");
    spec.gimbal_roll = axis == "roll";
    if (spec.signal != Signal::Gimbal && (doc.contains("axis") || doc.contains("gimbal_mode") || doc.contains("gimbal_frame"))) {
        throw ExperimentError("axis, gimbal_mode and gimbal_frame only apply to gimbal experiments");
    }

    if (doc.contains("segments")) {
        if (doc.contains("amplitude")) throw ExperimentError("give either segments or amplitude, not both");
        if (!doc["segments"].is_array() || doc["segments"].empty()) throw ExperimentError("segments must be a list");
        for (const auto& s : doc["segments"]) spec.segments.push_back(parse_segment(s));
    } else {
        if (!doc.contains("amplitude")) throw ExperimentError("experiment needs amplitude or segments");
        const double a = number(doc, "amplitude", 0.0);
        const double hold = number(doc, "hold", 2.0);
        const double rest = number(doc, "rest", 4.0);
        if (!(hold > 0) || !(rest > 0)) throw ExperimentError("hold and rest must be positive");
        spec.segments = {{Segment::Level::Value, a, hold}, {Segment::Level::Value, -a, hold},
                         {Segment::Level::Value, 0.0, rest}};
    }
    for (const auto& s : spec.segments) {
        if (s.level != Segment::Level::Value && spec.signal != Signal::Gimbal) {
            throw ExperimentError("\"max\"/\"min\" levels only apply to gimbal experiments");
        }
    }
    if (spec.duration() > 120.0) throw ExperimentError("experiment window longer than 120 s");
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ExperimentError("cannot open experiment spec " + path);
    const json doc = json::parse(in, nullptr, false, true);
    if (doc.is_discarded()) throw ExperimentError("experiment spec " + path + " is not valid JSON");
    return parse_experiment_spec(doc);
}

std::vector<Segment> resolve_segments(const ExperimentSpec& spec, const ModelParams& model) {
    std::vector<Segment> out = spec.segments;
    for (auto& s : out) {
        const double lo = spec.gimbal_roll ? -model.gimbal_roll_limit : model.gimbal_pitch_range.first;
        const double hi = spec.gimbal_roll ? model.gimbal_roll_limit : model.gimbal_pitch_range.second;
        if (s.level == Segment::Level::RangeMax) s.value = rad2deg(hi);
        if (s.level == Segment::Level::RangeMin) s.value = rad2deg(lo);
        s.level = Segment::Level::Value;
    }
    return out;
}

void ExperimentResult::write_csv(std::ostream& out) const {
    out << "t,cmd,meas,vx,vy,vz,z\n";
    char line[256];
    for (const auto& s : samples) {
        std::snprintf(line, sizeof line, "%.4f,%.6g,%.9g,%.9g,%.9g,%.9g,%.9g\n", s.t, s.cmd, s.meas, s.vx, s.vy,
                      s.vz, s.z);
        out << line;
    }
}

std::string ExperimentResult::csv() const {
    std::ostringstream out;
    write_csv(out);
    return out.str();
}

double gimbal_pitch_deg(const Quaternion& q, double heading_rad) {
    const RotationMatrix r = quaternion_to_rotation(q);
    // camera axis projected on the heading's vertical plane
    const double forward = r(0, 0) * std::cos(heading_rad) + r(1, 0) * std::sin(heading_rad);
    return rad2deg(std::atan2(-r(2, 0), forward));
}

double gimbal_roll_deg(const Quaternion& q) { return rad2deg(quaternion_to_euler(q).roll); }

ExperimentResult run_experiment(DroneClient& client, const ExperimentSpec& spec, const RunOptions& options) {
    auto log = [&](const std::string& m) {
        if (options.log) options.log(m);
    };
    const json info = client.hello();
    const auto model = parse_model(info.at("model").get<std::string>());
    if (!model) throw ExperimentError("drone reports unknown model " + info.at("model").dump());
    const ModelParams& mp = model_params(*model);
    const double factor = info.at("realtime_factor").get<double>();
    const double f_eff = factor <= 0.0 ? kMaxFactor : std::min(factor, kMaxFactor);
    const std::uint64_t epoch = info.at("epoch").get<std::uint64_t>();
    const std::uint64_t now = info.at("sim_stamp").get<std::uint64_t>();

    ExperimentResult result;
    result.name = spec.name;
    result.model = std::string(mp.model_name);
    result.signal = spec.signal;
    result.segments = resolve_segments(spec, mp);

    // Everything is scheduled on whole sim seconds, far enough ahead that the
    // runner cannot reach the first stamp before the timeline is sent.
    const std::uint64_t lead = seconds_ns(std::max(1.0, 0.25 * f_eff));
    const std::uint64_t t0 = epoch + (now + lead - epoch + kSecond - 1) / kSecond * kSecond;
    const std::uint64_t window = t0 + seconds_ns(kSetupLead);
    const std::uint64_t end = window + seconds_ns(spec.duration());
    result.window_stamp = window;

    // shared with callbacks that may outlive this call
    auto cap = std::make_shared<Capture>();
    auto on_row = [cap](auto member) {
        return [cap, member](const Envelope& e) {
            std::lock_guard lock(cap->mutex);
            (cap->rows[e.stamp]).*member = e.payload;
        };
    };
    struct Cleanup {
        DroneClient& client;
        ~Cleanup() {
            client.on_notice({});
            for (const char* t : {"drone/state", "drone/rpy", "drone/speed", "drone/altitude", "gimbal/attitude/absolute"}) {
                try {
                    client.unsubscribe(t);
                } catch (const std::exception&) {
                }
            }
        }
    } cleanup{client};
    client.on_notice([cap](const Envelope& e) {
        const std::string code = e.payload.value("code", std::string());
        const std::string text = e.channel + ": " + code + ": " + e.payload.value("message", std::string());
        std::lock_guard lock(cap->mutex);
        if (code == "late" || code == "disconnected") cap->failures.push_back(text);
        else cap->warnings.push_back(text);
        cap->changed.notify_all();
    });
    client.subscribe("drone/state", [cap](const Envelope& e) {
        std::lock_guard lock(cap->mutex);
        cap->states.emplace_back(e.stamp, e.payload.at("data").get<std::string>());
        cap->changed.notify_all();
    });
    client.subscribe("drone/rpy", on_row(&Capture::Row::rpy));
    client.subscribe("drone/speed", on_row(&Capture::Row::speed));
    client.subscribe("drone/altitude", on_row(&Capture::Row::altitude));
    if (spec.signal == Signal::Gimbal) {
        client.subscribe("gimbal/attitude/absolute", [cap](const Envelope& e) {
            std::lock_guard lock(cap->mutex);
            cap->gimbal.emplace_back(e.stamp, quaternion_of(e.payload));
        });
    }

    auto expect_ok = [cap](std::string what) {
        return [cap, what](const Envelope& e) {
            const bool ok = e.kind == Kind::ParamVal || (e.kind == Kind::Rep && e.payload.value("success", false));
            if (ok) return;
            std::lock_guard lock(cap->mutex);
            cap->failures.push_back(what + ": " + e.payload.value("code", std::string("failed")) + ": " +
                                   e.payload.value("message", std::string()));
            cap->changed.notify_all();
        };
    };
    auto timed_param = [&](const char* name, double v) {
        client.request_async({Kind::ParamSet, name, 0, t0, {{"value", v}}}, expect_ok(name));
    };
    auto timed_call = [&](const char* service, json req, std::uint64_t at) {
        client.request_async({Kind::Req, service, 0, at, std::move(req)}, expect_ok(service));
    };

    timed_param("drone/max_pitch_roll", 40.0);
    timed_param("drone/max_vertical_speed", 4.0);
    timed_param("drone/max_yaw_rate", 200.0);
    timed_param("drone/max_altitude", 100.0);
    timed_param("drone/max_distance", 4000.0);
    timed_call("gimbal/reset", json::object(), t0);
    timed_call("skycontroller/offboard", {{"data", true}}, t0);
    timed_call("drone/takeoff", json::object(), t0);
    client.publish("drone/moveby", {{"dx", 0.0}, {"dy", 0.0}, {"dz", spec.altitude - 1.0}, {"dyaw", 0.0}},
                   t0 + seconds_ns(kClimbAt));

    double offset = 0.0;
    for (const auto& seg : result.segments) {
        const std::uint64_t start = window + seconds_ns(offset);
        if (spec.signal == Signal::Gimbal) {
            const double roll = spec.gimbal_roll ? seg.value : 0.0;
            const double pitch = spec.gimbal_roll ? 0.0 : seg.value;
            client.publish("gimbal/command",
                           {{"mode", spec.gimbal_mode}, {"frame", spec.gimbal_frame}, {"roll", roll}, {"pitch", pitch},
                            {"yaw", 0.0}},
                           start);
        } else {
            const auto n = static_cast<int>(std::llround(seg.duration / kCommandPeriod));
            for (int k = 0; k < n; ++k) {
                client.publish(spec.channel, piloting(spec.signal, seg.value), start + seconds_ns(k * kCommandPeriod));
            }
        }
        offset += seg.duration;
    }
    if (spec.signal == Signal::Gimbal) timed_call("gimbal/reset", json::object(), end);
    timed_call("drone/land", json::object(), end);
    log(spec.name + ": scheduled on " + result.model + ", window opens at sim t+" +
        std::to_string((window - now) / 1e9) + " s");

    // wait for LANDED after the window or a failure
    const double sim_span = (end - now) / 1e9 + kLandingBudget;
    const auto timeout = options.timeout.value_or(std::chrono::milliseconds(static_cast<long long>(
        factor <= 0.0 ? 120'000.0 : 10'000.0 + 2'000.0 * sim_span / std::min(factor, kMaxFactor))));
    {
        std::unique_lock lock(cap->mutex);
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        std::size_t checked = 0;
        bool landed = false;
        while (!landed) {
            if (!cap->failures.empty()) throw ExperimentError(spec.name + ": " + cap->failures.front());
            for (; checked < cap->states.size(); ++checked) {
                const auto& [stamp, state] = cap->states[checked];
                if (stamp > end && state == "LANDED") landed = true;
                const bool in_window = stamp >= window && stamp < end;
                if (in_window && state != "HOVERING" && state != "FLYING") {
                    throw ExperimentError(spec.name + ": aborted, drone entered " + state + " during the window");
                }
            }
            if (landed) break;
            if (!client.connected()) throw ExperimentError(spec.name + ": connection lost");
            if (cap->changed.wait_until(lock, deadline) == std::cv_status::timeout) {
                throw ExperimentError(spec.name + ": timed out waiting for the drone to land");
            }
        }
    }

    std::lock_guard lock(cap->mutex);
    for (const auto& w : cap->warnings) log(spec.name + ": " + w);

    auto cmd_at = [&](double t) {
        double acc = 0.0;
        for (const auto& s : result.segments) {
            acc += s.duration;
            if (t < acc - 1e-9) return s.value;
        }
        return result.segments.back().value;
    };

    double yaw0 = 0.0, prev_yaw = 0.0, unwrapped = 0.0;
    bool first = true;
    std::size_t gi = 0;
    double gimbal_angle = 0.0;
    bool have_gimbal = false;
    for (const auto& [stamp, row] : cap->rows) {
        if (!row.rpy || !row.speed || !row.altitude) continue;
        const json& rpy = row.rpy->at("vector");
        const double yaw = rpy.at("z").get<double>();
        if (first) {
            prev_yaw = unwrapped = yaw;
        } else {
            unwrapped += rad2deg(wrap_pi(deg2rad(yaw - prev_yaw)));
            prev_yaw = yaw;
        }
        while (gi < cap->gimbal.size() && cap->gimbal[gi].first <= stamp) {
            const Quaternion& q = cap->gimbal[gi].second;
            gimbal_angle = spec.gimbal_roll ? gimbal_roll_deg(q) : gimbal_pitch_deg(q, deg2rad(yaw));
            have_gimbal = true;
            if (cap->gimbal[gi].first >= window && cap->gimbal[gi].first < end) {
                result.gimbal.push_back({(static_cast<double>(cap->gimbal[gi].first) - window) / 1e9, gimbal_angle});
            }
            ++gi;
        }
        if (stamp < window || stamp >= end) continue;
        if (first) yaw0 = unwrapped;
        first = false;
        const json& v = row.speed->at("vector");
        Sample s{};
        s.stamp = stamp;
        s.t = (static_cast<double>(stamp) - window) / 1e9;
        s.cmd = cmd_at(s.t);
        s.roll = rpy.at("x").get<double>();
        s.pitch = rpy.at("y").get<double>();
        // body velocity levelled into the heading frame: x forward, y left, z up
        const Vec3 level = euler_to_rotation({deg2rad(s.roll), deg2rad(s.pitch), 0.0}) *
                           Vec3{v.at("x").get<double>(), v.at("y").get<double>(), v.at("z").get<double>()};
        s.vx = level.x;
        s.vy = level.y;
        s.vz = level.z;
        s.z = row.altitude->at("data").get<double>();
        s.yaw = unwrapped - yaw0;
        switch (spec.signal) {
        case Signal::Pitch: s.meas = s.pitch; break;
        case Signal::Roll: s.meas = s.roll; break;
        case Signal::Yaw: s.meas = s.yaw; break;
        case Signal::Vertical: s.meas = s.vz; break;
        case Signal::Gimbal: s.meas = have_gimbal ? gimbal_angle : 0.0; break;
        }
        result.samples.push_back(s);
    }
    if (result.samples.empty()) throw ExperimentError(spec.name + ": no telemetry captured in the window");
    return result;
}

double peak_horizontal_speed(const std::vector<Sample>& samples, double from, double to) {
    double peak = 0.0;
    for (const auto& s : samples) {
        if (s.t >= from && s.t <= to) peak = std::max(peak, std::hypot(s.vx, s.vy));
    }
    return peak;
}

double value_at(const std::vector<Sample>& samples, double Sample::*field, double t) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    if (t <= samples.front().t) return samples.front().*field;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].t >= t) {
            const auto& a = samples[i - 1];
            const auto& b = samples[i];
            const double u = (t - a.t) / (b.t - a.t);
            return a.*field + u * (b.*field - a.*field);
        }
    }
    return samples.back().*field;
}

std::optional<double> first_crossing(const std::vector<Sample>& samples, double Sample::*field, double threshold,
                                     double from) {
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& a = samples[i - 1];
        const auto& b = samples[i];
        if (b.t < from) continue;
        const double va = std::abs(a.*field), vb = std::abs(b.*field);
        if (vb >= threshold) {
            if (a.t < from || va >= threshold) return std::max(from, b.t);
            return a.t + (threshold - va) / (vb - va) * (b.t - a.t);
        }
    }
    return std::nullopt;
}

std::optional<double> settling_time(const std::vector<GimbalReading>& readings, double target, double tolerance,
                                    double from, double to) {
    std::vector<GimbalReading> in;
    for (const auto& r : readings) {
        if (r.t >= from && r.t < to) in.push_back(r);
    }
    if (in.empty()) return std::nullopt;
    auto err = [&](const GimbalReading& r) { return std::abs(r.angle - target); };
    if (err(in.back()) > tolerance) return std::nullopt;
    std::size_t last_out = in.size();
    for (std::size_t i = in.size(); i-- > 0;) {
        if (err(in[i]) > tolerance) {
            last_out = i;
            break;
        }
    }
    if (last_out == in.size()) return 0.0;
    const auto& a = in[last_out];
    const auto& b = in[last_out + 1];
    const double ea = err(a), eb = err(b);
    double u;
    if (eb > 0.0) u = std::log(ea / tolerance) / std::log(ea / eb);
    else u = (ea - tolerance) / ea;
    return a.t + u * (b.t - a.t) - from;
}

}  // namespace anafi::gcs
