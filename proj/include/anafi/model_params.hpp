// Per-model envelopes (ANAFI 4K / Thermal / USA / Ai) and controller constants.
#pragma once

#include <optional>
#include <string_view>
#include <utility>

namespace anafi {

inline constexpr double kGravity = 9.80665;

enum class DroneModel { Anafi4k, Thermal, Usa, Ai };

inline constexpr DroneModel kAllModels[] = {DroneModel::Anafi4k, DroneModel::Thermal, DroneModel::Usa,
                                            DroneModel::Ai};

std::string_view to_string(DroneModel model);
std::optional<DroneModel> parse_model(std::string_view name);

struct Resolution {
    int width;
    int height;
};

struct ModelParams {
    DroneModel model;
    std::string_view model_name;

    // flight envelope
    double max_horizontal_speed;  // m/s, steady state at max_tilt
    double max_vertical_speed;    // m/s
    double max_tilt;              // rad
    double max_yaw_rate;          // rad/s
    double max_flight_time;       // s
    double max_wind_resistance;   // m/s, recorded only
    double mass;                  // kg

    // plant and low-level loops
    double attitude_time_constant;  // s
    double vertical_delay;          // s
    double yaw_delay;               // s
    double yaw_rate_time_constant;  // s
    double drag_coefficient;        // 1/m
    double vertical_kp;             // 1/s
    double vertical_ki;             // 1/s^2
    double inertia_xx;              // kg m^2
    double inertia_yy;
    double inertia_zz;

    // gimbal
    std::pair<double, double> gimbal_pitch_range;  // rad
    double gimbal_roll_limit;                      // rad, symmetric
    double gimbal_yaw_limit;                       // rad, symmetric; zero when yaw is not actuated
    double gimbal_time_constant;                   // s

    // camera
    double max_zoom;
    double video_hfov_deg;
    double photo_hfov_deg;
    Resolution stream_resolution;

    // battery
    int battery_cells;
    double battery_capacity_mah;
};

const ModelParams& model_params(DroneModel model);

/// Drag coefficient that makes `max_speed` the steady-state horizontal speed
/// at `max_tilt` for a thrust that holds altitude: k = g tan(tilt) / v^2.
double derive_drag_coefficient(double max_tilt, double max_speed);

}  // namespace anafi
