// Low-level control cascade and plant for one quadrotor.
//
// The autopilot consumes the virtual inputs (vertical speed, roll, pitch, yaw
// rate). Three independent loops turn them into thrust and body torques; the
// plant integrates a rigid body with first-order attitude response, transport
// delays on the vertical-speed and yaw-rate setpoints and quadratic horizontal
// drag.
#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "anafi/geometry.hpp"
#include "anafi/model_params.hpp"

namespace anafi {

struct VirtualCommand {
    double vertical_speed{0.0};  // m/s, positive up
    double roll{0.0};            // rad
    double pitch{0.0};           // rad, positive moves forward
    double yaw_rate{0.0};        // rad/s, positive counter-clockwise seen from above

    bool is_zero() const { return vertical_speed == 0.0 && roll == 0.0 && pitch == 0.0 && yaw_rate == 0.0; }
    constexpr bool operator==(const VirtualCommand&) const = default;
};

struct WrenchCommand {
    double thrust{0.0};  // N along body z
    double torque_roll{0.0};
    double torque_pitch{0.0};
    double torque_yaw{0.0};
};

struct PlantState {
    Vec3 position;        // world NWU, m
    Vec3 velocity;        // world NWU, m/s
    EulerAngles attitude;
    Vec3 body_rates;      // rad/s

    bool operator==(const PlantState&) const = default;
};

struct CommandLimits {
    double max_tilt;            // rad
    double max_vertical_speed;  // m/s
    double max_yaw_rate;        // rad/s
};

/// Saturates each field of `command` to +/- its limit.
VirtualCommand clamp_command(const VirtualCommand& command, const CommandLimits& limits);

/// Integral memory of the vertical-velocity loop.
struct CascadeState {
    double vertical_integral{0.0};
};

/// One evaluation of the three loops. `command` is the setpoint as seen by the
/// loops (after transport delay). `dt` is the loop period; the rate loop is
/// deadbeat over one period. Roll and pitch angle rates are capped at
/// `tilt_rate_limit` (rad/s).
WrenchCommand cascade(const VirtualCommand& command, const PlantState& state, const ModelParams& params,
                      CascadeState& memory, double dt,
                      double tilt_rate_limit = std::numeric_limits<double>::infinity());

/// Fixed-length FIFO realising a pure transport delay of `slots` periods.
class DelayLine {
public:
    explicit DelayLine(std::size_t slots = 0);

    /// Pushes `value` and returns the value pushed `slots` calls ago (0 initially).
    double push(double value);
    void reset();
    std::size_t slots() const { return buffer_.size(); }

private:
    std::vector<double> buffer_;
    std::size_t head_{0};
};

/// Plant + cascade for one vehicle. Deterministic: identical sequences of
/// (command, dt) produce bit-identical trajectories.
class FlightDynamics {
public:
    FlightDynamics(const ModelParams& params, double dt);

    /// Advances one period. Throws std::domain_error unless 0 < dt <= 0.01.
    const PlantState& step(const VirtualCommand& command);

    /// Motors off: zero thrust and torque, ballistic motion until ground contact.
    const PlantState& step_unpowered();

    /// Places the vehicle at rest at `position` (z clamped to ground) with the given yaw.
    void reset(const Vec3& position, double yaw);

    /// Caps the roll/pitch angle rate (drone/max_pitch_roll_rate).
    void set_tilt_rate_limit(double rad_per_s) { tilt_rate_limit_ = rad_per_s; }

    const PlantState& state() const { return state_; }
    const WrenchCommand& last_wrench() const { return wrench_; }
    const ModelParams& params() const { return *params_; }
    double dt() const { return dt_; }
    bool on_ground() const { return state_.position.z <= 0.0; }

private:
    const ModelParams* params_;
    double dt_;
    PlantState state_{};
    CascadeState memory_{};
    DelayLine vertical_delay_;
    DelayLine yaw_delay_;
    WrenchCommand wrench_{};
    double tilt_rate_limit_{std::numeric_limits<double>::infinity()};
};

/// Free-function form of FlightDynamics::step for callers holding their own
/// controller memory and delay lines.
PlantState step(const PlantState& state, const VirtualCommand& delayed_command, const ModelParams& params,
                CascadeState& memory, double dt);

}  // namespace anafi
