#include "anafi/model_params.hpp"

#include <cmath>
#include <stdexcept>

#include "anafi/geometry.hpp"

namespace anafi {

double derive_drag_coefficient(double max_tilt, double max_speed) {
    if (!(max_tilt > 0.0) || !(max_speed > 0.0)) {
        throw std::domain_error("drag calibration needs positive tilt and speed");
    }
    return kGravity * std::tan(max_tilt) / (max_speed * max_speed);
}

namespace {

constexpr double kMaxTilt = deg2rad(40.0);

ModelParams make(DroneModel model, std::string_view name, double vmax_h, double flight_minutes, double wind,
                 double mass_kg, double tau_att, double yaw_delay, double pitch_lo_deg, double pitch_hi_deg,
                 double gimbal_yaw_deg, double gimbal_tau, double zoom, double video_hfov, double photo_hfov,
                 Resolution stream, int cells, double capacity) {
    return ModelParams{
        .model = model,
        .model_name = name,
        .max_horizontal_speed = vmax_h,
        .max_vertical_speed = 4.0,
        .max_tilt = kMaxTilt,
        .max_yaw_rate = deg2rad(200.0),
        .max_flight_time = flight_minutes * 60.0,
        .max_wind_resistance = wind,
        .mass = mass_kg,
        .attitude_time_constant = tau_att,
        .vertical_delay = 0.15,
        .yaw_delay = yaw_delay,
        .yaw_rate_time_constant = 0.05,
        .drag_coefficient = derive_drag_coefficient(kMaxTilt, vmax_h),
        .vertical_kp = 5.0,
        .vertical_ki = 0.3,
        .inertia_xx = mass_kg * 0.012,
        .inertia_yy = mass_kg * 0.012,
        .inertia_zz = mass_kg * 0.020,
        .gimbal_pitch_range = {deg2rad(pitch_lo_deg), deg2rad(pitch_hi_deg)},
        .gimbal_roll_limit = deg2rad(35.0),
        .gimbal_yaw_limit = deg2rad(gimbal_yaw_deg),
        .gimbal_time_constant = gimbal_tau,
        .max_zoom = zoom,
        .video_hfov_deg = video_hfov,
        .photo_hfov_deg = photo_hfov,
        .stream_resolution = stream,
        .battery_cells = cells,
        .battery_capacity_mah = capacity,
    };
}

const ModelParams kModels[] = {
    make(DroneModel::Anafi4k, "4k", 15.0, 25.0, 13.9, 0.320, 0.25, 0.10, -90, 90, 0, 0.2, 3, 69, 84,
         {1280, 720}, 2, 2700),
    make(DroneModel::Thermal, "thermal", 15.0, 26.0, 13.9, 0.315, 0.25, 0.10, -90, 90, 0, 0.2, 3, 69, 84,
         {1280, 720}, 2, 2700),
    make(DroneModel::Usa, "usa", 14.7, 32.0, 14.7, 0.499, 0.15, 0.10, -90, 90, 0, 0.2, 32, 69, 75,
         {1280, 720}, 3, 3400),
    make(DroneModel::Ai, "ai", 16.0, 32.0, 12.7, 0.898, 0.30, 0.20, -116, 176, 35, 0.1, 6, 68, 73,
         {1920, 1080}, 3, 6800),
};

}  // namespace

std::string_view to_string(DroneModel model) { return model_params(model).model_name; }

std::optional<DroneModel> parse_model(std::string_view name) {
    for (const auto& p : kModels) {
        if (p.model_name == name) {
            return p.model;
        }
    }
    return std::nullopt;
}

const ModelParams& model_params(DroneModel model) {
    for (const auto& p : kModels) {
        if (p.model == model) {
            return p;
        }
    }
    throw std::invalid_argument("unknown drone model");
}

}  // namespace anafi
