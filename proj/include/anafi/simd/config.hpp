// Fleet configuration: one JSON document, environment overrides (SIMD_*) and
// command-line overrides applied on top by the caller.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "anafi/geo.hpp"
#include "anafi/model_params.hpp"

namespace anafi::simd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DroneSpec {
    std::string name;
    DroneModel model{DroneModel::Anafi4k};
    GeoPoint start{48.8784, 2.3677, 0.0};
    double heading_deg{0.0};  // initial heading, clockwise from north
    std::optional<std::uint16_t> port;
};

struct FleetConfig {
    std::vector<DroneSpec> drones;
    std::string host{"127.0.0.1"};
    std::uint16_t base_port{9090};  // 0 binds every endpoint to a free port
    double tick_rate{200.0};
    double realtime_factor{1.0};
    std::optional<GeoPoint> ground_station;
    std::optional<std::uint16_t> ws_port;
    bool require_arming{false};
    std::string log_level{"info"};

    /// Port of drone i (before binding when base_port is 0).
    std::uint16_t drone_port(std::size_t i) const;
    std::uint16_t fleet_port() const { return base_port == 0 ? 0 : static_cast<std::uint16_t>(base_port - 1); }
};

FleetConfig parse_fleet_config(const nlohmann::json& doc);
FleetConfig load_fleet_config(const std::string& path);

/// Applies SIMD_BASE_PORT, SIMD_REALTIME_FACTOR, SIMD_TICK_RATE, SIMD_WS_PORT,
/// SIMD_HOST and SIMD_LOG_LEVEL when set.
void apply_environment(FleetConfig& config);

/// Throws ConfigError on duplicate names or ports, bad rates or factors.
void validate(const FleetConfig& config);

}  // namespace anafi::simd
