#include "anafi/parameters.hpp"

#include <algorithm>
#include <cmath>

namespace anafi {

std::string_view to_string(ParamType type) {
    switch (type) {
    case ParamType::Bool: return "bool";
    case ParamType::Int: return "int";
    case ParamType::Float: return "float";
    case ParamType::String: return "string";
    }
    return "?";
}

namespace {

ParamSpec boolean(std::string_view name, bool def, std::string_view desc) {
    return {name, ParamType::Bool, def, 0, 0, {}, {}, false, desc};
}

ParamSpec integer(std::string_view name, std::int64_t def, std::vector<std::int64_t> allowed, std::string_view desc) {
    return {name, ParamType::Int, def, 0, 0, std::move(allowed), {}, false, desc};
}

ParamSpec real(std::string_view name, double def, double lo, double hi, std::string_view desc) {
    return {name, ParamType::Float, def, lo, hi, {}, {}, false, desc};
}

const std::vector<ParamSpec>& table() {
    static const std::vector<ParamSpec> specs = [] {
        std::vector<ParamSpec> v{
            boolean("camera/autorecord", false, "auto record at take-off"),
            integer("camera/ev_compensation", 9, {0, 3, 6, 9, 12, 15, 18},
                    "EV compensation: 0 -3.00, 3 -2.00, 6 -1.00, 9 0.00, 12 1.00, 15 2.00, 18 3.00"),
            boolean("camera/hdr", true, "high dynamic range"),
            real("camera/max_zoom_speed", 10.0, 0.1, 10.0, "max zoom speed (tan(deg)/s)"),
            integer("camera/mode", 0, {0, 1}, "camera mode: 0 recording, 1 photo"),
            boolean("camera/relative", false, "camera commands relative to the camera pitch"),
            integer("camera/rendering", 0, {0, 1, 2}, "thermal rendering: 0 visible, 1 thermal, 2 blended"),
            integer("camera/streaming", 0, {0, 1, 2},
                    "streaming mode: 0 minimize latency, 1 maximize reliability, 2 reliability with frame-rate decimation"),
            integer("camera/style", 0, {0, 1, 2, 3}, "image style: 0 natural, 1 plog, 2 intense, 3 pastel"),
            boolean("drone/banked_turn", true, "banked turn"),
            real("drone/max_altitude", 2.0, 0.5, 4000.0, "max altitude (m)"),
            real("drone/max_distance", 10.0, 10.0, 4000.0, "max distance from home (m)"),
            real("drone/max_horizontal_speed", 1.0, 0.1, 15.0, "max horizontal speed in autonomous flight (m/s)"),
            real("drone/max_pitch_roll", 10.0, 1.0, 40.0, "max pitch and roll angle (deg)"),
            real("drone/max_pitch_roll_rate", 200.0, 40.0, 300.0, "max pitch and roll rotation speed (deg/s)"),
            real("drone/max_vertical_speed", 1.0, 0.1, 4.0, "max vertical speed (m/s)"),
            real("drone/max_yaw_rate", 180.0, 3.0, 200.0, "max yaw rotation speed (deg/s)"),
            ParamSpec{"drone/model", ParamType::String, std::string{"unknown"}, 0, 0, {},
                      {"4k", "thermal", "usa", "ai", "unknown"}, true, "drone model"},
            real("gimbal/max_speed", 180.0, 1.0, 180.0, "max gimbal speed (deg/s)"),
            boolean("home/autotrigger", true, "return home on low battery"),
            integer("home/ending_behavior", 1, {0, 1}, "return home ending: 0 land, 1 hover"),
            real("home/min_altitude", 20.0, 20.0, 100.0, "return home minimum altitude (m)"),
            boolean("home/precise", true, "precise landing at home"),
            integer("home/type", 4, {1, 3, 4}, "home type: 1 take-off location, 3 custom location, 4 pilot location"),
            ParamSpec{"storage/download_folder", ParamType::String, std::string{"~/Pictures/Anafi"}, 0, 0, {}, {},
                      false, "download folder for media"},
        };
        std::sort(v.begin(), v.end(), [](const ParamSpec& a, const ParamSpec& b) { return a.name < b.name; });
        return v;
    }();
    return specs;
}

std::string fmt(std::string_view name, std::string_view what) {
    std::string s{name};
    s += ": ";
    s += what;
    return s;
}

ParamValue coerce(const ParamSpec& spec, const ParamValue& value) {
    switch (spec.type) {
    case ParamType::Bool:
        if (const auto* b = std::get_if<bool>(&value)) {
            return *b;
        }
        break;
    case ParamType::Int: {
        std::int64_t v;
        if (const auto* i = std::get_if<std::int64_t>(&value)) {
            v = *i;
        } else if (const auto* d = std::get_if<double>(&value); d && std::isfinite(*d) && std::trunc(*d) == *d &&
                                                               std::abs(*d) < 9.0e15) {
            v = static_cast<std::int64_t>(*d);
        } else {
            break;
        }
        if (std::find(spec.allowed_ints.begin(), spec.allowed_ints.end(), v) == spec.allowed_ints.end()) {
            throw ParameterError(ParameterError::Code::OutOfDomain,
                                 fmt(spec.name, "value " + std::to_string(v) + " not in allowed set"));
        }
        return v;
    }
    case ParamType::Float: {
        double v;
        if (const auto* d = std::get_if<double>(&value)) {
            v = *d;
        } else if (const auto* i = std::get_if<std::int64_t>(&value)) {
            v = static_cast<double>(*i);
        } else {
            break;
        }
        if (!std::isfinite(v)) {
            throw ParameterError(ParameterError::Code::OutOfDomain, fmt(spec.name, "value must be finite"));
        }
        return std::clamp(v, spec.min, spec.max);
    }
    case ParamType::String:
        if (const auto* s = std::get_if<std::string>(&value)) {
            if (!spec.allowed_strings.empty() &&
                std::find(spec.allowed_strings.begin(), spec.allowed_strings.end(), *s) == spec.allowed_strings.end()) {
                throw ParameterError(ParameterError::Code::OutOfDomain, fmt(spec.name, "value '" + *s + "' not allowed"));
            }
            return *s;
        }
        break;
    }
    throw ParameterError(ParameterError::Code::TypeMismatch,
                         fmt(spec.name, "expected " + std::string(to_string(spec.type))));
}

}  // namespace

std::span<const ParamSpec> parameter_specs() { return table(); }

const ParamSpec* find_param_spec(std::string_view name) {
    const auto& t = table();
    auto it = std::lower_bound(t.begin(), t.end(), name, [](const ParamSpec& s, std::string_view n) { return s.name < n; });
    return it != t.end() && it->name == name ? &*it : nullptr;
}

ParameterStore::ParameterStore(std::string_view model_name) {
    for (const auto& spec : table()) {
        values_.emplace(std::string(spec.name), spec.default_value);
    }
    const auto* model = find_param_spec("drone/model");
    values_["drone/model"] = coerce(*model, std::string(model_name));
}

const ParamValue& ParameterStore::set(std::string_view name, const ParamValue& value) {
    const ParamSpec* spec = find_param_spec(name);
    if (!spec) {
        throw ParameterError(ParameterError::Code::UnknownName, fmt(name, "unknown parameter"));
    }
    if (spec->read_only) {
        throw ParameterError(ParameterError::Code::ReadOnly, fmt(name, "read-only"));
    }
    ParamValue stored = coerce(*spec, value);
    if (name == "camera/rendering" && std::get<std::int64_t>(stored) != 0) {
        const auto& model = get_string("drone/model");
        if (model != "thermal" && model != "usa") {
            throw ParameterError(ParameterError::Code::OutOfDomain,
                                 fmt(name, "thermal rendering not supported by model " + model));
        }
    }
    auto it = values_.find(name);
    it->second = std::move(stored);
    return it->second;
}

const ParamValue& ParameterStore::get(std::string_view name) const {
    auto it = values_.find(name);
    if (it == values_.end()) {
        throw ParameterError(ParameterError::Code::UnknownName, fmt(name, "unknown parameter"));
    }
    return it->second;
}

bool ParameterStore::get_bool(std::string_view name) const { return std::get<bool>(get(name)); }
std::int64_t ParameterStore::get_int(std::string_view name) const { return std::get<std::int64_t>(get(name)); }
double ParameterStore::get_float(std::string_view name) const { return std::get<double>(get(name)); }
const std::string& ParameterStore::get_string(std::string_view name) const { return std::get<std::string>(get(name)); }

}  // namespace anafi
