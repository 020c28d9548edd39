#include "anafi/flight_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anafi {

namespace {
constexpr double kIntegralAuthority = 0.2;  // m/s^2
}  // namespace

VirtualCommand clamp_command(const VirtualCommand& command, const CommandLimits& limits) {
    auto sat = [](double v, double lim) { return std::clamp(v, -lim, lim); };
    return {
        sat(command.vertical_speed, limits.max_vertical_speed),
        sat(command.roll, limits.max_tilt),
        sat(command.pitch, limits.max_tilt),
        sat(command.yaw_rate, limits.max_yaw_rate),
    };
}

WrenchCommand cascade(const VirtualCommand& command, const PlantState& state, const ModelParams& params,
                      CascadeState& memory, double dt, double tilt_rate_limit) {
    const EulerAngles& att = state.attitude;
    WrenchCommand out;

    // vertical velocity controller: hover feed-forward with tilt compensation plus PI
    const double hover = params.mass * kGravity;
    const double tilt_gain = std::max(std::cos(att.roll) * std::cos(att.pitch), 0.2);
    const double error = command.vertical_speed - state.velocity.z;
    const double accel = params.vertical_kp * error + params.vertical_ki * memory.vertical_integral;
    const double raw = params.mass * (kGravity + accel) / tilt_gain;
    out.thrust = std::clamp(raw, 0.0, 2.0 * hover);
    if (raw == out.thrust || (raw > out.thrust) == (error < 0.0)) {
        // the integral only trims model error; its authority is kept small so
        // a stale integral cannot bias the steady vertical speed
        const double limit = kIntegralAuthority / params.vertical_ki;
        memory.vertical_integral = std::clamp(memory.vertical_integral + error * dt, -limit, limit);
    }

    // roll & pitch controller: first-order Euler-angle response
    const double tau = params.attitude_time_constant;
    const double roll_rate = std::clamp((command.roll - att.roll) / tau, -tilt_rate_limit, tilt_rate_limit);
    const double pitch_rate = std::clamp((command.pitch - att.pitch) / tau, -tilt_rate_limit, tilt_rate_limit);

    // yaw rate controller: first-order lag on the body z rate
    const double wz = state.body_rates.z;
    const double blend = std::min(1.0, dt / params.yaw_rate_time_constant);
    const double wz_target = wz + (command.yaw_rate - wz) * blend;
    const double cf = std::cos(att.roll), sf = std::sin(att.roll), ct = std::cos(att.pitch);
    const double yaw_angle_rate = (wz_target + sf * pitch_rate) / (cf * ct);

    const Vec3 rates_target = body_rate_matrix(att) * Vec3{roll_rate, pitch_rate, yaw_angle_rate};
    const Vec3 rate_error = rates_target - state.body_rates;
    out.torque_roll = params.inertia_xx * rate_error.x / dt;
    out.torque_pitch = params.inertia_yy * rate_error.y / dt;
    out.torque_yaw = params.inertia_zz * rate_error.z / dt;
    return out;
}

namespace {

void check_dt(double dt) {
    if (!(dt > 0.0) || dt > 0.01) {
        throw std::domain_error("physics period must satisfy 0 < dt <= 0.01 s");
    }
}

// Semi-implicit Euler: rates, then attitude, then velocity, then position.
void integrate_plant(PlantState& s, const WrenchCommand& w, const ModelParams& params, double dt) {
    s.body_rates.x += dt * w.torque_roll / params.inertia_xx;
    s.body_rates.y += dt * w.torque_pitch / params.inertia_yy;
    s.body_rates.z += dt * w.torque_yaw / params.inertia_zz;

    const Vec3 euler_rates = euler_rate_matrix(s.attitude) * s.body_rates;
    s.attitude.roll += dt * euler_rates.x;
    s.attitude.pitch += dt * euler_rates.y;
    s.attitude.yaw = wrap_pi(s.attitude.yaw + dt * euler_rates.z);

    const Vec3 thrust_world = euler_to_rotation(s.attitude) * Vec3{0.0, 0.0, w.thrust / params.mass};
    const double speed_h = std::hypot(s.velocity.x, s.velocity.y);
    const double k = params.drag_coefficient;
    const Vec3 accel{
        thrust_world.x - k * speed_h * s.velocity.x,
        thrust_world.y - k * speed_h * s.velocity.y,
        thrust_world.z - kGravity,
    };
    s.velocity += accel * dt;
    s.position += s.velocity * dt;

    if (s.position.z <= 0.0 && s.velocity.z <= 0.0) {
        s.position.z = 0.0;
        s.velocity = {};
    }
}

}  // namespace

DelayLine::DelayLine(std::size_t slots) : buffer_(slots, 0.0) {}

double DelayLine::push(double value) {
    if (buffer_.empty()) {
        return value;
    }
    const double out = buffer_[head_];
    buffer_[head_] = value;
    head_ = (head_ + 1) % buffer_.size();
    return out;
}

void DelayLine::reset() {
    std::fill(buffer_.begin(), buffer_.end(), 0.0);
    head_ = 0;
}

namespace {
std::size_t slots_for(double delay, double dt) {
    return static_cast<std::size_t>(std::lround(delay / dt));
}
}  // namespace

FlightDynamics::FlightDynamics(const ModelParams& params, double dt)
    : params_(&params), dt_(dt), vertical_delay_(0), yaw_delay_(0) {
    check_dt(dt);
    vertical_delay_ = DelayLine(slots_for(params.vertical_delay, dt));
    yaw_delay_ = DelayLine(slots_for(params.yaw_delay, dt));
}

const PlantState& FlightDynamics::step(const VirtualCommand& command) {
    VirtualCommand delayed = command;
    delayed.vertical_speed = vertical_delay_.push(command.vertical_speed);
    delayed.yaw_rate = yaw_delay_.push(command.yaw_rate);
    wrench_ = cascade(delayed, state_, *params_, memory_, dt_, tilt_rate_limit_);
    integrate_plant(state_, wrench_, *params_, dt_);
    return state_;
}

const PlantState& FlightDynamics::step_unpowered() {
    vertical_delay_.push(0.0);
    yaw_delay_.push(0.0);
    memory_ = {};
    wrench_ = {};
    integrate_plant(state_, wrench_, *params_, dt_);
    if (on_ground()) {
        state_.body_rates = {};
    }
    return state_;
}

void FlightDynamics::reset(const Vec3& position, double yaw) {
    state_ = {};
    state_.position = {position.x, position.y, std::max(0.0, position.z)};
    state_.attitude.yaw = wrap_pi(yaw);
    memory_ = {};
    wrench_ = {};
    vertical_delay_.reset();
    yaw_delay_.reset();
}

PlantState step(const PlantState& state, const VirtualCommand& delayed_command, const ModelParams& params,
                CascadeState& memory, double dt) {
    check_dt(dt);
    PlantState next = state;
    const WrenchCommand w = cascade(delayed_command, state, params, memory, dt);
    integrate_plant(next, w, params, dt);
    return next;
}

}  // namespace anafi
