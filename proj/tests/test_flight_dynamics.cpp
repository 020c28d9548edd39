#include <gtest/gtest.h>

#include <random>

#include "anafi/flight_dynamics.hpp"

using namespace anafi;

namespace {

constexpr double kDt = 0.005;

FlightDynamics hovering(const ModelParams& p, double z = 10.0) {
    FlightDynamics fd(p, kDt);
    fd.reset({0, 0, z}, 0.0);
    return fd;
}

double horizontal_speed(const PlantState& s) { return std::hypot(s.velocity.x, s.velocity.y); }

// Oracle: bisection on g tan(tilt) - k v^2 = 0 for k.
double drag_root(double tilt, double v) {
    double lo = 0, hi = 1;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kGravity * std::tan(tilt) - mid * v * v > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Cascade, HoverEquilibrium) {
    for (auto m : kAllModels) {
        const auto& p = model_params(m);
        CascadeState mem;
        PlantState s;
        s.position = {0, 0, 5};
        const auto w = cascade({}, s, p, mem, kDt);
        EXPECT_NEAR(w.thrust, p.mass * kGravity, 1e-9);
        EXPECT_EQ(w.torque_roll, 0.0);
        EXPECT_EQ(w.torque_pitch, 0.0);
        EXPECT_EQ(w.torque_yaw, 0.0);
    }
}

TEST(Cascade, ClimbCommandRaisesThrust) {
    const auto& p = model_params(DroneModel::Anafi4k);
    CascadeState mem;
    PlantState s;
    const auto w = cascade({1.0, 0, 0, 0}, s, p, mem, kDt);
    EXPECT_GT(w.thrust, p.mass * kGravity);
    EXPECT_LE(w.thrust, 2 * p.mass * kGravity);
    const auto down = cascade({-100.0, 0, 0, 0}, s, p, mem, kDt);
    EXPECT_GE(down.thrust, 0.0);
}

TEST(Step, RejectsBadPeriod) {
    const auto& p = model_params(DroneModel::Ai);
    EXPECT_THROW(FlightDynamics(p, 0.0), std::domain_error);
    EXPECT_THROW(FlightDynamics(p, 0.02), std::domain_error);
    CascadeState mem;
    EXPECT_THROW(step({}, {}, p, mem, -1.0), std::domain_error);
    EXPECT_NO_THROW(step({}, {}, p, mem, 0.01));
}

TEST(Step, ZeroCommandHoldsState) {
    for (auto m : kAllModels) {
        auto fd = hovering(model_params(m));
        const PlantState start = fd.state();
        for (int i = 0; i < 10000; ++i) {
            fd.step({});
        }
        EXPECT_NEAR(fd.state().position.z, start.position.z, 1e-9);
        EXPECT_NEAR(horizontal_speed(fd.state()), 0.0, 1e-12);
        EXPECT_NEAR(fd.state().attitude.roll, 0.0, 1e-12);
        EXPECT_NEAR(fd.state().attitude.pitch, 0.0, 1e-12);
    }
}

TEST(Step, GroundClampsDescent) {
    FlightDynamics fd(model_params(DroneModel::Usa), kDt);
    fd.reset({0, 0, 0.2}, 0);
    for (int i = 0; i < 600; ++i) {
        fd.step({-4.0, 0, 0, 0});
        ASSERT_GE(fd.state().position.z, 0.0);
    }
    EXPECT_EQ(fd.state().position.z, 0.0);
    EXPECT_EQ(fd.state().velocity.z, 0.0);
}

TEST(Step, UnpoweredFallsToGround) {
    auto fd = hovering(model_params(DroneModel::Anafi4k), 5.0);
    int ticks = 0;
    while (!fd.on_ground() && ticks < 1000) {
        fd.step_unpowered();
        ++ticks;
    }
    // free fall oracle: sqrt(2 z / g)
    EXPECT_NEAR(ticks * kDt, std::sqrt(2 * 5.0 / kGravity), 0.02);
}

TEST(ClampCommand, SaturatesEachField) {
    const CommandLimits lim{deg2rad(40), 4.0, deg2rad(200)};
    const auto c = clamp_command({0, 0, deg2rad(50), deg2rad(-250)}, lim);
    EXPECT_DOUBLE_EQ(c.pitch, deg2rad(40));
    EXPECT_DOUBLE_EQ(c.yaw_rate, deg2rad(-200));
    EXPECT_EQ(clamp_command({}, lim), VirtualCommand{});
    const auto v = clamp_command({9, -1, 0.1, 0}, lim);
    EXPECT_DOUBLE_EQ(v.vertical_speed, 4.0);
    EXPECT_DOUBLE_EQ(v.roll, -deg2rad(40));
    EXPECT_DOUBLE_EQ(v.pitch, 0.1);
}

TEST(Drag, CoefficientMatchesRoot) {
    EXPECT_NEAR(derive_drag_coefficient(deg2rad(40), 15), drag_root(deg2rad(40), 15), 1e-12);
    EXPECT_NEAR(derive_drag_coefficient(deg2rad(40), 16), drag_root(deg2rad(40), 16), 1e-12);
    EXPECT_NEAR(derive_drag_coefficient(deg2rad(40), 15), 0.0366, 5e-5);
    EXPECT_NEAR(derive_drag_coefficient(deg2rad(40), 16), 0.0322, 1e-4);
    EXPECT_THROW(derive_drag_coefficient(0, 15), std::domain_error);
    EXPECT_THROW(derive_drag_coefficient(0.5, -1), std::domain_error);
}

TEST(Drag, TerminalSpeedWithinOnePercent) {
    for (auto m : kAllModels) {
        const auto& p = model_params(m);
        auto fd = hovering(p);
        for (int i = 0; i < 2000; ++i) {
            fd.step({0, 0, p.max_tilt, 0});
        }
        EXPECT_NEAR(horizontal_speed(fd.state()), p.max_horizontal_speed, 0.01 * p.max_horizontal_speed)
            << p.model_name;
    }
}

TEST(Step, MonotoneSpeedUnderMaxTilt) {
    for (auto m : kAllModels) {
        const auto& p = model_params(m);
        auto fd = hovering(p);
        double prev = 0;
        for (int i = 0; i < 4000; ++i) {
            const double v = horizontal_speed(fd.step({0, p.max_tilt, 0, 0}));
            if (prev < 0.98 * p.max_horizontal_speed) {
                ASSERT_GE(v, prev - 1e-12) << p.model_name << " tick " << i;
            }
            prev = v;
        }
    }
}

TEST(Step, SaturationUnderRandomCommands) {
    std::mt19937_64 rng(41);
    for (auto m : kAllModels) {
        const auto& p = model_params(m);
        const CommandLimits lim{p.max_tilt, p.max_vertical_speed, p.max_yaw_rate};
        std::uniform_real_distribution<double> u(-2, 2);
        auto fd = hovering(p, 200.0);
        VirtualCommand cmd;
        double since_change = 0;
        double vz_change_age = 0;
        for (int i = 0; i < 40000; ++i) {
            if (i % 200 == 0) {
                const VirtualCommand next =
                    clamp_command({u(rng) * 4, u(rng) * p.max_tilt, u(rng) * p.max_tilt, u(rng) * p.max_yaw_rate}, lim);
                if (next.vertical_speed != cmd.vertical_speed) vz_change_age = 0;
                cmd = next;
                since_change = 0;
            }
            const auto& s = fd.step(cmd);
            since_change += kDt;
            vz_change_age += kDt;
            ASSERT_LE(std::abs(s.attitude.roll), p.max_tilt + 1e-9);
            ASSERT_LE(std::abs(s.attitude.pitch), p.max_tilt + 1e-9);
            if (vz_change_age > 3.0 && s.position.z > 1.0) {
                ASSERT_LE(std::abs(s.velocity.z), p.max_vertical_speed + 0.05)
                    << p.model_name << " i " << i << " cmd " << cmd.vertical_speed << " " << cmd.roll << " " << cmd.pitch
                    << " att " << s.attitude.roll << " " << s.attitude.pitch << " tc " << since_change;
            }
        }
    }
}

TEST(Step, VerticalOvershootBounded) {
    for (auto m : kAllModels) {
        const auto& p = model_params(m);
        auto fd = hovering(p, 100.0);
        double peak = 0;
        for (int i = 0; i < 2000; ++i) {
            peak = std::max(peak, std::abs(fd.step({4.0, 0, 0, 0}).velocity.z));
        }
        EXPECT_LE(peak, p.max_vertical_speed + 0.05) << p.model_name;
    }
}

TEST(Step, TiltRateLimit) {
    const auto& p = model_params(DroneModel::Usa);
    auto fd = hovering(p);
    fd.set_tilt_rate_limit(deg2rad(40));
    double prev = 0, worst = 0;
    for (int i = 0; i < 400; ++i) {
        const double pitch = fd.step({0, 0, p.max_tilt, 0}).attitude.pitch;
        worst = std::max(worst, (pitch - prev) / kDt);
        prev = pitch;
    }
    EXPECT_LE(worst, deg2rad(40) + 1e-6);
    EXPECT_NEAR(prev, p.max_tilt, deg2rad(1));
}

TEST(Step, Deterministic) {
    auto run = [] {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        auto fd = hovering(model_params(DroneModel::Ai));
        std::vector<PlantState> trace;
        for (int i = 0; i < 5000; ++i) {
            trace.push_back(fd.step({u(rng), u(rng), u(rng), u(rng)}));
        }
        return trace;
    };
    EXPECT_EQ(run(), run());
}

TEST(DelayLine, ShiftsBySlots) {
    DelayLine d(3);
    EXPECT_EQ(d.push(1), 0);
    EXPECT_EQ(d.push(2), 0);
    EXPECT_EQ(d.push(3), 0);
    EXPECT_EQ(d.push(4), 1);
    EXPECT_EQ(d.push(5), 2);
    d.reset();
    EXPECT_EQ(d.push(6), 0);
    DelayLine none;
    EXPECT_EQ(none.push(7), 7);
}

TEST(DelayLine, SlotCountFromModel) {
    FlightDynamics fd(model_params(DroneModel::Ai), kDt);
    // a yaw-rate command acts only after the modelled delay (0.20 s = 40 ticks)
    fd.reset({0, 0, 10}, 0);
    int first = -1;
    for (int i = 0; i < 100; ++i) {
        if (std::abs(fd.step({0, 0, 0, 1.0}).body_rates.z) > 1e-9 && first < 0) first = i;
    }
    EXPECT_EQ(first, 40);
}
