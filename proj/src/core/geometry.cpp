#include "anafi/geometry.hpp"

#include <algorithm>

namespace anafi {

namespace {

constexpr double kLockThreshold = 1.0 - 1e-9;
constexpr double kPitchSingularMargin = 1e-6;

void require_finite(const EulerAngles& e) {
    if (!e.finite()) {
        throw std::domain_error("euler angles must be finite");
    }
}

}  // namespace

double wrap_pi(double angle) {
    if (angle >= -kPi && angle < kPi) {
        return angle;
    }
    double wrapped = std::fmod(angle + kPi, 2.0 * kPi);
    if (wrapped < 0.0) {
        wrapped += 2.0 * kPi;
    }
    wrapped -= kPi;
    // fmod can land exactly on +pi after rounding
    return wrapped >= kPi ? wrapped - 2.0 * kPi : wrapped;
}

double max_abs_diff(const Mat3& lhs, const Mat3& rhs) {
    double worst = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        worst = std::max(worst, std::abs(lhs.a[i] - rhs.a[i]));
    }
    return worst;
}

RotationMatrix RotationMatrix::from_matrix(const Mat3& m) {
    RotationMatrix r{m};
    if (r.orthonormality_error() > 1e-9) {
        throw std::domain_error("matrix is not a proper rotation");
    }
    return r;
}

double RotationMatrix::orthonormality_error() const {
    const Mat3 gram = m_.transpose() * m_;
    return std::max(max_abs_diff(gram, Mat3::identity()), std::abs(m_.determinant() - 1.0));
}

RotationMatrix euler_to_rotation(const EulerAngles& e) {
    require_finite(e);
    const double cf = std::cos(e.roll), sf = std::sin(e.roll);
    const double ct = std::cos(e.pitch), st = std::sin(e.pitch);
    const double cp = std::cos(e.yaw), sp = std::sin(e.yaw);
    return RotationMatrix{Mat3{{
        cp * ct, cp * sf * st - cf * sp, sf * sp + cf * cp * st,  //
        ct * sp, cf * cp + sf * sp * st, cf * sp * st - cp * sf,  //
        -st, ct * sf, cf * ct,
    }}};
}

EulerDecomposition rotation_to_euler(const RotationMatrix& r) {
    const double r31 = r(2, 0);
    EulerDecomposition out;
    if (std::abs(r31) > kLockThreshold) {
        const double pitch = r31 < 0.0 ? kPi / 2.0 : -kPi / 2.0;
        const double s = std::sin(pitch);
        out.angles = {wrap_pi(std::atan2(r(0, 1) * s, r(0, 2) * s)), pitch, 0.0};
        out.gimbal_lock = true;
        return out;
    }
    out.angles.pitch = -std::asin(std::clamp(r31, -1.0, 1.0));
    out.angles.roll = wrap_pi(std::atan2(r(2, 1), r(2, 2)));
    out.angles.yaw = wrap_pi(std::atan2(r(1, 0), r(0, 0)));
    return out;
}

Vec3 body_to_world_velocity(const EulerAngles& e, const Vec3& v_body) {
    return euler_to_rotation(e) * v_body;
}

Vec3 world_to_body(const EulerAngles& e, const Vec3& v_world) {
    return euler_to_rotation(e).transpose() * v_world;
}

Mat3 euler_rate_matrix(const EulerAngles& e) {
    require_finite(e);
    if (std::abs(e.pitch) >= kPi / 2.0 - kPitchSingularMargin) {
        throw SingularityError("euler rate matrix is singular at |pitch| = pi/2");
    }
    const double cf = std::cos(e.roll), sf = std::sin(e.roll);
    const double ct = std::cos(e.pitch), tt = std::tan(e.pitch);
    return Mat3{{
        1.0, sf * tt, cf * tt,  //
        0.0, cf, -sf,           //
        0.0, sf / ct, cf / ct,
    }};
}

Mat3 body_rate_matrix(const EulerAngles& e) {
    require_finite(e);
    const double cf = std::cos(e.roll), sf = std::sin(e.roll);
    const double ct = std::cos(e.pitch), st = std::sin(e.pitch);
    return Mat3{{
        1.0, 0.0, -st,     //
        0.0, cf, sf * ct,  //
        0.0, -sf, cf * ct,
    }};
}

RotationMatrix gimbal_world_attitude(const EulerAngles& drone, const EulerAngles& gimbal) {
    return euler_to_rotation(drone) * euler_to_rotation(gimbal);
}

Vec3 gimbal_world_position(const Vec3& p_drone, const EulerAngles& drone, const Vec3& p_offset) {
    return p_drone + euler_to_rotation(drone) * p_offset;
}

Quaternion euler_to_quaternion(const EulerAngles& e) {
    require_finite(e);
    const double cr = std::cos(e.roll / 2), sr = std::sin(e.roll / 2);
    const double cp = std::cos(e.pitch / 2), sp = std::sin(e.pitch / 2);
    const double cy = std::cos(e.yaw / 2), sy = std::sin(e.yaw / 2);
    Quaternion q{
        cr * cp * cy + sr * sp * sy,
        sr * cp * cy - cr * sp * sy,
        cr * sp * cy + sr * cp * sy,
        cr * cp * sy - sr * sp * cy,
    };
    if (q.w < 0.0) {
        q = {-q.w, -q.x, -q.y, -q.z};
    }
    return q;
}

RotationMatrix quaternion_to_rotation(const Quaternion& q) {
    const double n = q.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::domain_error("quaternion must be finite and non-zero");
    }
    const double w = q.w / n, x = q.x / n, y = q.y / n, z = q.z / n;
    return RotationMatrix{Mat3{{
        1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),  //
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),  //
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y),
    }}};
}

EulerAngles quaternion_to_euler(const Quaternion& q) {
    return rotation_to_euler(quaternion_to_rotation(q)).angles;
}

}  // namespace anafi
