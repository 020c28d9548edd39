#include "anafi/trajectory.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace anafi {

TrapezoidProfile::TrapezoidProfile(double distance, double max_speed, double max_accel)
    : distance_(distance), accel_(max_accel) {
    if (!(distance >= 0.0) || !(max_speed > 0.0) || !(max_accel > 0.0)) {
        throw std::domain_error("trapezoid needs distance >= 0 and positive limits");
    }
    peak_ = std::min(max_speed, std::sqrt(distance * max_accel));
    ramp_ = peak_ > 0.0 ? peak_ / max_accel : 0.0;
    cruise_ = peak_ > 0.0 ? std::max(0.0, (distance - peak_ * ramp_) / peak_) : 0.0;
}

ProfileSample TrapezoidProfile::at(double t) const {
    if (t <= 0.0 || distance_ == 0.0) return {0.0, 0.0, 0.0};
    if (t >= duration()) return {distance_, 0.0, 0.0};
    if (t < ramp_) return {0.5 * accel_ * t * t, accel_ * t, accel_};
    const double ramp_dist = 0.5 * peak_ * ramp_;
    if (t < ramp_ + cruise_) return {ramp_dist + peak_ * (t - ramp_), peak_, 0.0};
    const double r = duration() - t;
    return {distance_ - 0.5 * accel_ * r * r, accel_ * r, -accel_};
}

namespace {

// Scales a per-axis limit to the segment direction.
double along(const Vec3& u, double horizontal, double vertical) {
    const double h = std::hypot(u.x, u.y), v = std::abs(u.z);
    double lim = std::numeric_limits<double>::infinity();
    if (h > 1e-12) lim = std::min(lim, horizontal / h);
    if (v > 1e-12) lim = std::min(lim, vertical / v);
    return std::isfinite(lim) ? lim : horizontal;
}

}  // namespace

Leg::Leg(const Vec3& start, double start_yaw, const Vec3& end, double yaw_delta, bool yaw_first,
         const MotionLimits& limits)
    : start_(start), end_(end), start_yaw_(start_yaw), yaw_delta_(yaw_delta) {
    const Vec3 d = end - start;
    const double len = d.norm();
    dir_ = len > 0.0 ? d / len : Vec3{};
    line_ = TrapezoidProfile(len, along(dir_, limits.horizontal_speed, limits.vertical_speed),
                             along(dir_, limits.horizontal_accel, limits.vertical_accel));
    turn_ = TrapezoidProfile(std::abs(yaw_delta), limits.yaw_rate, limits.yaw_accel);
    translate_offset_ = yaw_first ? turn_.duration() : 0.0;
}

double Leg::duration() const { return std::max(turn_.duration(), translate_offset_ + line_.duration()); }

Reference Leg::at(double t) const {
    const ProfileSample s = line_.at(t - translate_offset_);
    const ProfileSample y = turn_.at(t);
    const double sign = yaw_delta_ < 0.0 ? -1.0 : 1.0;
    return {
        start_ + dir_ * s.s,
        dir_ * s.v,
        dir_ * s.a,
        wrap_pi(start_yaw_ + sign * y.s),
        sign * y.v,
    };
}

}  // namespace anafi
