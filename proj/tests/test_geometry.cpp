#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <random>

#include "anafi/geometry.hpp"

using namespace anafi;

namespace {

Eigen::Matrix3d to_eigen(const Mat3& m) {
    Eigen::Matrix3d e;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) e(r, c) = m(r, c);
    return e;
}

// Oracle: explicit product of the single-axis rotations.
Eigen::Matrix3d zyx(double roll, double pitch, double yaw) {
    return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

EulerAngles random_euler(std::mt19937_64& rng, double max_pitch = deg2rad(89.0)) {
    std::uniform_real_distribution<double> a(-kPi, kPi), p(-max_pitch, max_pitch);
    return {a(rng), p(rng), a(rng)};
}

double angle_diff(double a, double b) { return std::abs(wrap_pi(a - b)); }

}  // namespace

TEST(Rotation, IdentityAndPureYaw) {
    EXPECT_EQ(euler_to_rotation({0, 0, 0}).matrix(), Mat3::identity());
    const auto r = euler_to_rotation({0, 0, kPi / 2});
    EXPECT_NEAR(r(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(r(1, 0), 1.0, 1e-15);
    EXPECT_NEAR(r(2, 0), 0.0, 1e-15);
}

TEST(Rotation, MatchesAxisProduct) {
    const auto r = euler_to_rotation({0.3, -0.2, 1.1});
    EXPECT_LT((to_eigen(r.matrix()) - zyx(0.3, -0.2, 1.1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Rotation, NonFiniteRejected) {
    EXPECT_THROW(euler_to_rotation({NAN, 0, 0}), std::domain_error);
    EXPECT_THROW(euler_to_rotation({0, INFINITY, 0}), std::domain_error);
}

TEST(Rotation, FromMatrixChecksOrthonormality) {
    Mat3 m = Mat3::identity();
    m(0, 1) = 1e-6;
    EXPECT_THROW(RotationMatrix::from_matrix(m), std::domain_error);
    Mat3 reflect = Mat3::identity();
    reflect(2, 2) = -1;
    EXPECT_THROW(RotationMatrix::from_matrix(reflect), std::domain_error);
    EXPECT_NO_THROW(RotationMatrix::from_matrix(euler_to_rotation({0.1, 0.2, 0.3}).matrix()));
}

TEST(Rotation, SO3AndRoundTripOverRandomSamples) {
    std::mt19937_64 rng(7);
    double worst_orth = 0, worst_trip = 0, worst_eigen = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto e = random_euler(rng);
        const auto r = euler_to_rotation(e);
        worst_orth = std::max(worst_orth, r.orthonormality_error());
        const auto d = rotation_to_euler(r);
        ASSERT_FALSE(d.gimbal_lock);
        worst_trip = std::max({worst_trip, angle_diff(d.angles.roll, e.roll), angle_diff(d.angles.pitch, e.pitch),
                               angle_diff(d.angles.yaw, e.yaw)});
        if (i % 100 == 0) {
            worst_eigen = std::max(worst_eigen, (to_eigen(r.matrix()) - zyx(e.roll, e.pitch, e.yaw)).cwiseAbs().maxCoeff());
        }
    }
    EXPECT_LT(worst_orth, 1e-9);
    EXPECT_LT(worst_trip, 1e-9);
    EXPECT_LT(worst_eigen, 1e-12);
}

TEST(Rotation, EulerRangesAfterDecomposition) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> any(-10, 10);
    for (int i = 0; i < 10000; ++i) {
        const auto d = rotation_to_euler(euler_to_rotation({any(rng), any(rng), any(rng)})).angles;
        EXPECT_GE(d.roll, -kPi);
        EXPECT_LT(d.roll, kPi);
        EXPECT_GE(d.yaw, -kPi);
        EXPECT_LT(d.yaw, kPi);
        EXPECT_LE(std::abs(d.pitch), kPi / 2);
    }
}

TEST(Rotation, GimbalLock) {
    const auto up = rotation_to_euler(euler_to_rotation({0.4, kPi / 2, 0.9}));
    EXPECT_TRUE(up.gimbal_lock);
    EXPECT_DOUBLE_EQ(up.angles.pitch, kPi / 2);
    EXPECT_EQ(up.angles.yaw, 0.0);
    // the decomposition still reproduces the rotation
    EXPECT_LT(max_abs_diff(euler_to_rotation(up.angles).matrix(), euler_to_rotation({0.4, kPi / 2, 0.9}).matrix()),
              1e-9);

    const auto down = rotation_to_euler(euler_to_rotation({-0.3, -kPi / 2, 1.7}));
    EXPECT_TRUE(down.gimbal_lock);
    EXPECT_DOUBLE_EQ(down.angles.pitch, -kPi / 2);
    EXPECT_LT(max_abs_diff(euler_to_rotation(down.angles).matrix(),
                           euler_to_rotation({-0.3, -kPi / 2, 1.7}).matrix()),
              1e-9);
}

TEST(Velocity, BodyToWorld) {
    const Vec3 v{1, 2, 3};
    EXPECT_EQ(body_to_world_velocity({0, 0, 0}, v), v);
    const Vec3 w = body_to_world_velocity({0, 0, kPi / 2}, {1, 0, 0});
    EXPECT_NEAR(w.x, 0, 1e-12);
    EXPECT_NEAR(w.y, 1, 1e-12);
    EXPECT_NEAR(w.z, 0, 1e-12);
}

TEST(Velocity, NormPreservedAndInverse) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(-20, 20);
    for (int i = 0; i < 100000; ++i) {
        const auto e = random_euler(rng);
        const Vec3 v{c(rng), c(rng), c(rng)};
        const Vec3 w = body_to_world_velocity(e, v);
        ASSERT_NEAR(w.norm(), v.norm(), 1e-12);
        const Vec3 back = world_to_body(e, w);
        ASSERT_NEAR((back - v).norm(), 0.0, 1e-12);
    }
}

TEST(EulerRates, IdentityAtLevel) {
    EXPECT_LT(max_abs_diff(euler_rate_matrix({0, 0, 1.3}), Mat3::identity()), 1e-15);
}

TEST(EulerRates, SingularPitch) {
    EXPECT_THROW(euler_rate_matrix({0, kPi / 2, 0}), SingularityError);
    EXPECT_THROW(euler_rate_matrix({0, -kPi / 2 + 1e-7, 0}), SingularityError);
    EXPECT_NO_THROW(euler_rate_matrix({0, kPi / 2 - 1e-3, 0}));
}

TEST(EulerRates, InverseMatrix) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const auto e = random_euler(rng, deg2rad(80));
        EXPECT_LT(max_abs_diff(euler_rate_matrix(e) * body_rate_matrix(e), Mat3::identity()), 1e-9);
    }
}

// Oracle: propagate the rotation exactly by the body rate (R * exp(w h)) and
// take a central difference of the decomposed angles.
TEST(EulerRates, FiniteDifferenceOracle) {
    const EulerAngles e{0.2, 0.3, -0.4};
    const Eigen::Vector3d w_body(0.1, -0.2, 0.05);
    const double h = 1e-6;
    const Eigen::Matrix3d r0 = zyx(e.roll, e.pitch, e.yaw);
    auto angles_after = [&](double t) {
        const Eigen::Matrix3d r = r0 * Eigen::AngleAxisd(w_body.norm() * t, w_body.normalized()).toRotationMatrix();
        const Eigen::Vector3d ypr = r.eulerAngles(2, 1, 0);  // yaw, pitch, roll
        EulerAngles out{ypr[2], ypr[1], ypr[0]};
        // the Eigen solver may choose the other branch; fold it back near e
        if (std::abs(wrap_pi(out.roll - e.roll)) > 1.0) {
            out = {out.roll + kPi, kPi - out.pitch, out.yaw + kPi};
        }
        return out;
    };
    const auto plus = angles_after(h), minus = angles_after(-h);
    const Vec3 fd{wrap_pi(plus.roll - minus.roll) / (2 * h), wrap_pi(plus.pitch - minus.pitch) / (2 * h),
                  wrap_pi(plus.yaw - minus.yaw) / (2 * h)};
    const Vec3 mapped = euler_rate_matrix(e) * Vec3{w_body.x(), w_body.y(), w_body.z()};
    EXPECT_NEAR(mapped.x, fd.x, 1e-5);
    EXPECT_NEAR(mapped.y, fd.y, 1e-5);
    EXPECT_NEAR(mapped.z, fd.z, 1e-5);
}

// Integrating Euler angles with T * w (RK4, dt 1e-4) agrees with the exact
// quaternion propagation of a constant body rate over 1 s.
TEST(EulerRates, IntegrationMatchesQuaternionPropagation) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> rate(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        EulerAngles e = random_euler(rng, deg2rad(45));
        const EulerAngles start = e;
        const Vec3 w{rate(rng), rate(rng), rate(rng)};
        const double dt = 1e-4;
        auto f = [&](const EulerAngles& a) { return euler_rate_matrix(a) * w; };
        auto add = [](const EulerAngles& a, const Vec3& d, double s) {
            return EulerAngles{a.roll + d.x * s, a.pitch + d.y * s, a.yaw + d.z * s};
        };
        for (int i = 0; i < 10000; ++i) {
            const Vec3 k1 = f(e), k2 = f(add(e, k1, dt / 2)), k3 = f(add(e, k2, dt / 2)), k4 = f(add(e, k3, dt));
            e = add(e, k1 + k2 * 2.0 + k3 * 2.0 + k4, dt / 6);
        }
        const Eigen::Vector3d wv(w.x, w.y, w.z);
        const Eigen::Quaterniond q = Eigen::Quaterniond(zyx(start.roll, start.pitch, start.yaw)) *
                                     Eigen::Quaterniond(Eigen::AngleAxisd(wv.norm(), wv.normalized()));
        const Eigen::Matrix3d oracle = q.toRotationMatrix();
        const Eigen::Matrix3d mine = to_eigen(euler_to_rotation(e).matrix());
        // rotation-angle distance between the two results
        const double angle = Eigen::AngleAxisd(oracle.transpose() * mine).angle();
        EXPECT_LT(angle, 1e-5) << "trial " << trial;
    }
}

TEST(Gimbal, KnownCases) {
    const auto r = gimbal_world_attitude({0, 0, 0}, {0, -kPi / 4, 0});
    EXPECT_LT((to_eigen(r.matrix()) - zyx(0, -kPi / 4, 0)).cwiseAbs().maxCoeff(), 1e-15);
    const auto c = rotation_to_euler(gimbal_world_attitude({0, kPi / 6, 0}, {0, -kPi / 6, 0}));
    EXPECT_NEAR(c.angles.pitch, 0.0, 1e-12);
}

TEST(Gimbal, CompositionEqualsProduct) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_euler(rng), b = random_euler(rng);
        const auto composed = gimbal_world_attitude(a, b);
        EXPECT_EQ(composed.matrix(), (euler_to_rotation(a) * euler_to_rotation(b)).matrix());
        const Eigen::Matrix3d oracle = zyx(a.roll, a.pitch, a.yaw) * zyx(b.roll, b.pitch, b.yaw);
        ASSERT_LT((to_eigen(composed.matrix()) - oracle).cwiseAbs().maxCoeff(), 1e-12);
        ASSERT_LT(composed.orthonormality_error(), 1e-9);
    }
}

TEST(Gimbal, WorldPosition) {
    Vec3 p = gimbal_world_position({0, 0, 1}, {0, 0, 0}, {0.1, 0, 0});
    EXPECT_NEAR((p - Vec3{0.1, 0, 1}).norm(), 0, 1e-15);
    p = gimbal_world_position({0, 0, 1}, {0, 0, kPi}, {0.1, 0, 0});
    EXPECT_NEAR((p - Vec3{-0.1, 0, 1}).norm(), 0, 1e-12);

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> c(-5, 5);
    for (int i = 0; i < 10000; ++i) {
        const auto e = random_euler(rng);
        const Vec3 pd{c(rng), c(rng), c(rng)}, off{c(rng), c(rng), c(rng)};
        const Eigen::Vector3d oracle =
            Eigen::Vector3d(pd.x, pd.y, pd.z) + zyx(e.roll, e.pitch, e.yaw) * Eigen::Vector3d(off.x, off.y, off.z);
        const Vec3 got = gimbal_world_position(pd, e, off);
        ASSERT_LT((Eigen::Vector3d(got.x, got.y, got.z) - oracle).norm(), 1e-12);
    }
}

TEST(Quaternion, KnownValues) {
    const auto q0 = euler_to_quaternion({0, 0, 0});
    EXPECT_DOUBLE_EQ(q0.w, 1);
    EXPECT_DOUBLE_EQ(q0.x, 0);
    const auto q = euler_to_quaternion({0, 0, kPi / 2});
    EXPECT_NEAR(q.w, std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(q.z, std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(q.x, 0, 1e-15);
    EXPECT_NEAR(q.y, 0, 1e-15);
}

TEST(Quaternion, RoundTripAndMatrixEquivalence) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100000; ++i) {
        const auto e = random_euler(rng);
        const auto q = euler_to_quaternion(e);
        ASSERT_GE(q.w, 0.0);
        ASSERT_NEAR(q.norm(), 1.0, 1e-9);
        ASSERT_LT(max_abs_diff(quaternion_to_rotation(q).matrix(), euler_to_rotation(e).matrix()), 1e-9);
        const auto back = quaternion_to_euler(q);
        ASSERT_LT(angle_diff(back.roll, e.roll), 1e-9);
        ASSERT_LT(angle_diff(back.pitch, e.pitch), 1e-9);
        ASSERT_LT(angle_diff(back.yaw, e.yaw), 1e-9);
        if (i % 1000 == 0) {
            const Eigen::Quaterniond oracle(zyx(e.roll, e.pitch, e.yaw));
            const double sign = oracle.w() < 0 ? -1 : 1;
            EXPECT_NEAR(q.w, sign * oracle.w(), 1e-12);
            EXPECT_NEAR(q.x, sign * oracle.x(), 1e-12);
            EXPECT_NEAR(q.y, sign * oracle.y(), 1e-12);
            EXPECT_NEAR(q.z, sign * oracle.z(), 1e-12);
        }
    }
}

TEST(Angles, WrapPi) {
    EXPECT_DOUBLE_EQ(wrap_pi(kPi), -kPi);
    EXPECT_DOUBLE_EQ(wrap_pi(-kPi), -kPi);
    EXPECT_NEAR(wrap_pi(3 * kPi + 0.1), -kPi + 0.1, 1e-12);
    EXPECT_NEAR(wrap_pi(-0.5), -0.5, 1e-15);
}
