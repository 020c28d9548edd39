// Time-parametrised references for autonomous moves: trapezoidal velocity
// profiles along a straight segment, with an optional rotation either before
// or during the translation.
#pragma once

#include "anafi/geometry.hpp"

namespace anafi {

struct ProfileSample {
    double s{0.0};  // distance covered
    double v{0.0};
    double a{0.0};
};

/// Rest-to-rest trapezoid (triangle when the distance is too short to cruise).
class TrapezoidProfile {
public:
    TrapezoidProfile() = default;
    TrapezoidProfile(double distance, double max_speed, double max_accel);

    double duration() const { return 2.0 * ramp_ + cruise_; }
    double distance() const { return distance_; }
    double peak_speed() const { return peak_; }
    ProfileSample at(double t) const;

private:
    double distance_{0.0};
    double accel_{1.0};
    double peak_{0.0};
    double ramp_{0.0};
    double cruise_{0.0};
};

struct MotionLimits {
    double horizontal_speed;  // m/s
    double vertical_speed;    // m/s
    double yaw_rate;          // rad/s
    double horizontal_accel{2.0};
    double vertical_accel{2.0};
    double yaw_accel{deg2rad(360.0)};
};

struct Reference {
    Vec3 position;
    Vec3 velocity;
    Vec3 acceleration;
    double yaw{0.0};
    double yaw_rate{0.0};
};

/// Straight segment from `start` to `end` while yaw changes by `yaw_delta`
/// (not wrapped, so a full turn is expressible). With `yaw_first` the
/// rotation completes before translation starts.
class Leg {
public:
    Leg(const Vec3& start, double start_yaw, const Vec3& end, double yaw_delta, bool yaw_first,
        const MotionLimits& limits);

    Reference at(double t) const;
    double duration() const;
    const Vec3& start() const { return start_; }
    const Vec3& end() const { return end_; }
    double end_yaw() const { return wrap_pi(start_yaw_ + yaw_delta_); }

private:
    Vec3 start_;
    Vec3 end_;
    Vec3 dir_;
    double start_yaw_;
    double yaw_delta_;
    double translate_offset_;
    TrapezoidProfile line_;
    TrapezoidProfile turn_;
};

}  // namespace anafi
