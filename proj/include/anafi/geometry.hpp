// Frame conventions and transforms for the drone, gimbal and camera.
//
// World frame is north-west-up (x north, y west, z up); the body frame is
// front-left-up with its origin at the centre of mass. Euler angles follow
// the intrinsic Z-Y-X (yaw-pitch-roll) sequence, all in radians.
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace anafi {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into [-pi, pi).
double wrap_pi(double angle);

struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3&) const = default;

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Dense row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> a{};

    static constexpr Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

    constexpr double& operator()(int r, int c) { return a[static_cast<std::size_t>(r * 3 + c)]; }
    constexpr double operator()(int r, int c) const { return a[static_cast<std::size_t>(r * 3 + c)]; }

    constexpr Vec3 operator*(const Vec3& v) const {
        return {a[0] * v.x + a[1] * v.y + a[2] * v.z, a[3] * v.x + a[4] * v.y + a[5] * v.z,
                a[6] * v.x + a[7] * v.y + a[8] * v.z};
    }
    constexpr Mat3 operator*(const Mat3& o) const {
        Mat3 out;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                out(r, c) = (*this)(r, 0) * o(0, c) + (*this)(r, 1) * o(1, c) + (*this)(r, 2) * o(2, c);
            }
        }
        return out;
    }
    constexpr Mat3 transpose() const {
        return Mat3{{a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]}};
    }
    constexpr double determinant() const {
        return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
               a[2] * (a[3] * a[7] - a[4] * a[6]);
    }
    constexpr bool operator==(const Mat3&) const = default;
};

/// Largest absolute entry of (lhs - rhs).
double max_abs_diff(const Mat3& lhs, const Mat3& rhs);

struct EulerAngles {
    double roll{0.0};
    double pitch{0.0};
    double yaw{0.0};

    bool finite() const { return std::isfinite(roll) && std::isfinite(pitch) && std::isfinite(yaw); }
    constexpr bool operator==(const EulerAngles&) const = default;
};

struct Quaternion {
    double w{1.0};
    double x{0.0};
    double y{0.0};
    double z{0.0};

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
};

/// A proper rotation. Only constructible from the transforms below or from a
/// matrix that passes the SO(3) check.
class RotationMatrix {
public:
    RotationMatrix() = default;

    /// Throws std::domain_error when `m` is not orthonormal with det +1 (1e-9).
    static RotationMatrix from_matrix(const Mat3& m);

    const Mat3& matrix() const { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }

    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    RotationMatrix operator*(const RotationMatrix& o) const { return RotationMatrix{m_ * o.m_}; }
    RotationMatrix transpose() const { return RotationMatrix{m_.transpose()}; }

    /// Max deviation of R^T R from I and of det(R) from 1.
    double orthonormality_error() const;

private:
    explicit RotationMatrix(const Mat3& m) : m_(m) {}
    Mat3 m_{Mat3::identity()};

    friend RotationMatrix euler_to_rotation(const EulerAngles& e);
    friend RotationMatrix quaternion_to_rotation(const Quaternion& q);
};

struct EulerDecomposition {
    EulerAngles angles;
    bool gimbal_lock{false};
};

/// Thrown by euler_rate_matrix when sec(pitch) is unbounded.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

RotationMatrix euler_to_rotation(const EulerAngles& e);

/// Inverse of euler_to_rotation. At |sin(pitch)| > 1 - 1e-9 the yaw is set to
/// zero, roll absorbs the remaining rotation and the lock flag is raised.
EulerDecomposition rotation_to_euler(const RotationMatrix& r);

Vec3 body_to_world_velocity(const EulerAngles& e, const Vec3& v_body);
Vec3 world_to_body(const EulerAngles& e, const Vec3& v_world);

/// Maps body angular rates to Euler-angle rates: d(roll,pitch,yaw)/dt = T * w_body.
Mat3 euler_rate_matrix(const EulerAngles& e);

/// Inverse of euler_rate_matrix (maps Euler rates to body rates); defined everywhere.
Mat3 body_rate_matrix(const EulerAngles& e);

/// R(drone) * R(gimbal relative to drone).
RotationMatrix gimbal_world_attitude(const EulerAngles& drone, const EulerAngles& gimbal);

/// p_drone + R(drone) * p_offset.
Vec3 gimbal_world_position(const Vec3& p_drone, const EulerAngles& drone, const Vec3& p_offset);

/// Canonical (w >= 0) unit quaternion.
Quaternion euler_to_quaternion(const EulerAngles& e);
EulerAngles quaternion_to_euler(const Quaternion& q);
RotationMatrix quaternion_to_rotation(const Quaternion& q);

}  // namespace anafi
