#include "anafi/simd/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

namespace anafi::simd {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& obj, const char* key, T fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

std::uint16_t port_value(const json& v, const char* what) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 65535) {
        throw ConfigError(std::string(what) + " must be an integer in [0, 65535]");
    }
    return static_cast<std::uint16_t>(v.get<std::int64_t>());
}

GeoPoint geo(const json& obj, GeoPoint fallback) {
    return {field(obj, "latitude", fallback.latitude), field(obj, "longitude", fallback.longitude),
            field(obj, "altitude", fallback.altitude)};
}

const char* env(const char* name) {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
}

double parse_double(const char* text, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(text, &end);
    if (end == text || *end != '\0') throw ConfigError(std::string(what) + ": not a number: " + text);
    return v;
}

std::uint16_t parse_port(const char* text, const char* what) {
    const double v = parse_double(text, what);
    if (v < 0 || v > 65535 || v != static_cast<int>(v)) throw ConfigError(std::string(what) + ": bad port " + text);
    return static_cast<std::uint16_t>(v);
}

}  // namespace

std::uint16_t FleetConfig::drone_port(std::size_t i) const {
    if (drones[i].port) return *drones[i].port;
    if (base_port == 0) return 0;
    return static_cast<std::uint16_t>(base_port + i);
}

FleetConfig parse_fleet_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{"drones",         "host",      "base_port", "tick_rate",
                                             "realtime_factor", "ws_port",  "log_level", "ground_station",
                                             "require_arming"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError("unknown config field '" + it.key() + "'");
    }
    FleetConfig c;
    c.host = field(doc, "host", c.host);
    if (doc.contains("base_port")) c.base_port = port_value(doc["base_port"], "base_port");
    c.tick_rate = field(doc, "tick_rate", c.tick_rate);
    c.realtime_factor = field(doc, "realtime_factor", c.realtime_factor);
    if (doc.contains("ws_port") && !doc["ws_port"].is_null()) c.ws_port = port_value(doc["ws_port"], "ws_port");
    c.log_level = field(doc, "log_level", c.log_level);
    c.require_arming = field(doc, "require_arming", c.require_arming);
    if (doc.contains("ground_station")) {
        if (!doc["ground_station"].is_object()) throw ConfigError("ground_station must be an object");
        c.ground_station = geo(doc["ground_station"], {});
    }
    const auto drones = doc.find("drones");
    if (drones == doc.end() || !drones->is_array() || drones->empty()) {
        throw ConfigError("config needs a non-empty 'drones' list");
    }
    for (const auto& d : *drones) {
        if (!d.is_object()) throw ConfigError("each drone must be an object");
        static const std::set<std::string> drone_fields{"name",      "model",   "latitude", "longitude",
                                                        "altitude",  "heading", "port"};
        for (auto it = d.begin(); it != d.end(); ++it) {
            if (!drone_fields.count(it.key())) throw ConfigError("unknown drone field '" + it.key() + "'");
        }
        DroneSpec s;
        s.name = field(d, "name", std::string());
        const std::string model = field(d, "model", std::string("4k"));
        const auto m = parse_model(model);
        if (!m) throw ConfigError("drone '" + s.name + "': unknown model '" + model + "'");
        s.model = *m;
        s.start = geo(d, s.start);
        s.heading_deg = field(d, "heading", 0.0);
        if (d.contains("port")) s.port = port_value(d["port"], "port");
        c.drones.push_back(std::move(s));
    }
    return c;
}

FleetConfig load_fleet_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    const json doc = json::parse(in, nullptr, false, true);
    if (doc.is_discarded()) throw ConfigError("config " + path + " is not valid JSON");
    return parse_fleet_config(doc);
}

void apply_environment(FleetConfig& c) {
    if (const char* v = env("SIMD_BASE_PORT")) c.base_port = parse_port(v, "SIMD_BASE_PORT");
    if (const char* v = env("SIMD_REALTIME_FACTOR")) c.realtime_factor = parse_double(v, "SIMD_REALTIME_FACTOR");
    if (const char* v = env("SIMD_TICK_RATE")) c.tick_rate = parse_double(v, "SIMD_TICK_RATE");
    if (const char* v = env("SIMD_WS_PORT")) c.ws_port = parse_port(v, "SIMD_WS_PORT");
    if (const char* v = env("SIMD_HOST")) c.host = v;
    if (const char* v = env("SIMD_LOG_LEVEL")) c.log_level = v;
}

void validate(const FleetConfig& c) {
    if (c.drones.empty()) throw ConfigError("fleet has no drones");
    if (!(c.tick_rate >= 100.0 && c.tick_rate <= 1000.0)) throw ConfigError("tick_rate must be in [100, 1000] Hz");
    if (!(c.realtime_factor >= 0.0)) throw ConfigError("realtime_factor must be >= 0");
    if (c.base_port == 1) throw ConfigError("base_port 1 leaves no room for the fleet-info port");
    std::set<std::string> names;
    std::map<std::uint16_t, std::string> ports;
    auto claim = [&](std::uint16_t port, const std::string& who) {
        if (port == 0) return;
        const auto [it, fresh] = ports.emplace(port, who);
        if (!fresh) throw ConfigError("port " + std::to_string(port) + " assigned to both " + it->second + " and " + who);
    };
    claim(c.fleet_port(), "fleet-info");
    if (c.ws_port) claim(*c.ws_port, "websocket bridge");
    for (std::size_t i = 0; i < c.drones.size(); ++i) {
        const auto& d = c.drones[i];
        if (d.name.empty()) throw ConfigError("drone " + std::to_string(i) + " has no name");
        if (d.name.find('/') != std::string::npos) throw ConfigError("drone name '" + d.name + "' contains '/'");
        if (!names.insert(d.name).second) throw ConfigError("duplicate drone name '" + d.name + "'");
        if (c.base_port != 0 && !d.port && c.base_port + i > 65535) throw ConfigError("port range exceeds 65535");
        claim(c.drone_port(i), "drone '" + d.name + "'");
    }
}

}  // namespace anafi::simd
