#include <gtest/gtest.h>

#include <random>
#include <set>

#include "anafi/vehicle.hpp"

using namespace anafi;

namespace {

VehicleConfig config_for(DroneModel m, double yaw = 0.0) {
    VehicleConfig c;
    c.model = m;
    c.initial_yaw = yaw;
    return c;
}

Vehicle landed(DroneModel m = DroneModel::Anafi4k, double yaw = 0.0) {
    Vehicle v(config_for(m, yaw));
    v.mark_ready();
    v.tick();
    return v;
}

void run(Vehicle& v, double seconds) {
    const auto n = static_cast<int>(std::lround(seconds / v.dt()));
    for (int i = 0; i < n; ++i) v.tick();
}

template <typename Pred>
bool run_until(Vehicle& v, double limit, Pred done) {
    const auto n = static_cast<int>(std::lround(limit / v.dt()));
    for (int i = 0; i < n; ++i) {
        if (done()) return true;
        v.tick();
    }
    return done();
}

void open_limits(Vehicle& v) {
    v.set_param("drone/max_pitch_roll", 40.0);
    v.set_param("drone/max_vertical_speed", 4.0);
    v.set_param("drone/max_yaw_rate", 200.0);
    v.set_param("drone/max_altitude", 100.0);
    v.set_param("drone/max_distance", 4000.0);
    v.set_param("drone/max_horizontal_speed", 15.0);
}

Vehicle hovering(DroneModel m = DroneModel::Anafi4k, double yaw = 0.0) {
    Vehicle v = landed(m, yaw);
    EXPECT_TRUE(v.takeoff().ok);
    EXPECT_TRUE(run_until(v, 10.0, [&] { return v.state() == FlightState::Hovering; }));
    return v;
}

double tilt(const Vehicle& v) {
    return std::max(std::abs(v.plant().attitude.roll), std::abs(v.plant().attitude.pitch));
}

double horizontal_distance(const Vec3& a, const Vec3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string square_plan(const GeoPoint& o, double side, double alt) {
    const double dlat = rad2deg(side / kEarthRadius);
    const double dlon = rad2deg(side / (kEarthRadius * std::cos(deg2rad(o.latitude))));
    FlightPlan plan{"sq",
                    {{o.latitude + dlat, o.longitude, alt, 0},
                     {o.latitude + dlat, o.longitude - dlon, alt, 270},
                     {o.latitude, o.longitude - dlon, alt, 180},
                     {o.latitude, o.longitude, alt, 90}}};
    return format_mission(plan);
}

}  // namespace

TEST(StateGraph, BootsThroughConnecting) {
    Vehicle v(config_for(DroneModel::Ai));
    v.tick();
    EXPECT_EQ(v.state(), FlightState::Connecting);
    v.mark_ready();
    v.tick();
    EXPECT_EQ(v.state(), FlightState::Landed);
}

TEST(StateGraph, EdgesAreExactlyTheDeclaredOnes) {
    using S = FlightState;
    const std::set<std::pair<S, S>> edges{
        {S::Connecting, S::Landed}, {S::Landed, S::TakingOff},  {S::TakingOff, S::Hovering},
        {S::TakingOff, S::Landing}, {S::Hovering, S::Flying},   {S::Flying, S::Hovering},
        {S::Hovering, S::Landing},  {S::Flying, S::Landing},    {S::Landing, S::Landed},
        {S::Disconnected, S::Connecting},
    };
    const S all[] = {S::Connecting, S::Landed,  S::TakingOff, S::Hovering,
                     S::Flying,     S::Landing, S::Emergency, S::Disconnected};
    for (S a : all) {
        for (S b : all) {
            const bool want = edges.count({a, b}) || b == S::Emergency || b == S::Disconnected;
            EXPECT_EQ(transition_allowed(a, b), want) << to_string(a) << "->" << to_string(b);
        }
    }
}

TEST(StateGraph, RandomRequestsOnlyTakeDeclaredEdges) {
    std::mt19937_64 rng(5);
    Vehicle v = landed(DroneModel::Usa);
    v.set_offboard(true);
    std::uniform_int_distribution<int> pick(0, 11);
    std::uniform_real_distribution<double> u(-1, 1);
    FlightState prev = v.state();
    for (int i = 0; i < 30000; ++i) {
        if (i % 100 == 0) {
            switch (pick(rng)) {
            case 0: v.takeoff(); break;
            case 1: v.land(); break;
            case 2: v.halt(); break;
            case 3: v.piloting({u(rng) * 10, u(rng) * 10, u(rng) * 50, u(rng)}); break;
            case 4: v.move_by({u(rng) * 3, u(rng) * 3, 0, u(rng) * 90}); break;
            case 5: v.rth(); break;
            case 6: if (u(rng) > 0.9) v.emergency(); break;
            case 7: v.reboot(); break;
            case 8: v.sticks({static_cast<int>(u(rng) * 100), 0, 0, 0, 0, 0}); break;
            case 9: v.piloting({}); break;
            case 10: v.set_param("home/type", std::int64_t{1}); break;
            default: break;
            }
        }
        v.tick();
        if (v.state() != prev) {
            ASSERT_TRUE(transition_allowed(prev, v.state())) << to_string(prev) << "->" << to_string(v.state());
            prev = v.state();
        }
    }
}

TEST(Takeoff, ReachesOneMetreWithinThreeSeconds) {
    for (auto m : kAllModels) {
        Vehicle v = landed(m);
        ASSERT_TRUE(v.takeoff().ok);
        EXPECT_EQ(v.state(), FlightState::TakingOff);
        EXPECT_TRUE(run_until(v, 3.0, [&] { return v.state() == FlightState::Hovering; })) << to_string(m);
        EXPECT_NEAR(v.plant().position.z, 1.0, 0.05);
        EXPECT_NEAR(v.altitude_above_takeoff(), 1.0, 0.05);
    }
}

TEST(Services, InvalidStateErrors) {
    Vehicle v = landed();
    const Outcome land = v.land();
    EXPECT_FALSE(land.ok);
    EXPECT_EQ(land.code, "invalid_state");
    EXPECT_EQ(v.halt().code, "invalid_state");
    EXPECT_EQ(v.rth().code, "invalid_state");
    v = hovering();
    EXPECT_EQ(v.takeoff().code, "invalid_state");
    EXPECT_EQ(v.calibrate().code, "invalid_state");
    EXPECT_EQ(v.reboot().code, "invalid_state");
    EXPECT_EQ(v.gimbal_calibrate().code, "invalid_state");
}

TEST(Services, LandReturnsToLanded) {
    Vehicle v = hovering();
    ASSERT_TRUE(v.land().ok);
    EXPECT_TRUE(run_until(v, 10.0, [&] { return v.state() == FlightState::Landed; }));
    EXPECT_EQ(v.plant().position.z, 0.0);
}

TEST(Services, EmergencyFallsAndNeedsReboot) {
    Vehicle v = hovering(DroneModel::Thermal);
    open_limits(v);
    v.move_by({0, 0, 4, 0});
    run_until(v, 15.0, [&] { return v.state() == FlightState::Hovering; });
    ASSERT_NEAR(v.plant().position.z, 5.0, 0.1);
    ASSERT_TRUE(v.emergency().ok);
    EXPECT_TRUE(run_until(v, 1.2, [&] { return v.plant().position.z == 0.0; }));
    EXPECT_EQ(v.state(), FlightState::Emergency);
    EXPECT_EQ(v.takeoff().code, "invalid_state");
    ASSERT_TRUE(v.reboot().ok);
    EXPECT_EQ(v.state(), FlightState::Disconnected);
    run(v, 1.1);
    EXPECT_EQ(v.state(), FlightState::Landed);
    EXPECT_TRUE(v.takeoff().ok);
}

TEST(Services, RequireArming) {
    VehicleConfig c;
    c.require_arming = true;
    Vehicle v(c);
    v.mark_ready();
    v.tick();
    EXPECT_EQ(v.takeoff().code, "not_armed");
    EXPECT_TRUE(v.arm(true).ok);
    EXPECT_TRUE(v.takeoff().ok);
    EXPECT_FALSE(v.arm(false).ok);
}

TEST(Services, CalibrationDefersAndBlocksTakeoff) {
    Vehicle v = landed();
    const Outcome o = v.calibrate();
    EXPECT_TRUE(o.ok);
    EXPECT_DOUBLE_EQ(o.defer_s, 2.0);
    EXPECT_EQ(v.takeoff().code, "busy");
    run(v, 2.1);
    EXPECT_TRUE(v.takeoff().ok);
}

TEST(Battery, DrainsOverFlightTime) {
    const auto& p = model_params(DroneModel::Anafi4k);
    Vehicle v = hovering();
    const double start = v.battery_percent();
    const double t0 = v.sim_time();
    run(v, 60.0);
    EXPECT_NEAR(start - v.battery_percent(), 100.0 * (v.sim_time() - t0) / p.max_flight_time, 1e-6);
    EXPECT_NEAR(v.battery_voltage(), p.battery_cells * (3.3 + 0.9 * v.battery_percent() / 100.0), 1e-12);
}

TEST(Battery, DoesNotDrainOnGround) {
    Vehicle v = landed();
    run(v, 30.0);
    EXPECT_EQ(v.battery_percent(), 100.0);
}

TEST(Battery, EmptyForcesLanding) {
    Vehicle v = hovering(DroneModel::Ai);
    v.set_param("home/autotrigger", false);
    const double flight = v.model().max_flight_time;
    EXPECT_TRUE(run_until(v, flight + 5.0, [&] { return v.state() == FlightState::Landing; }));
    EXPECT_EQ(v.battery_percent(), 0.0);
    EXPECT_TRUE(run_until(v, 10.0, [&] { return v.state() == FlightState::Landed; }));
}

TEST(Battery, LowBatteryTriggersReturnHome) {
    Vehicle v = hovering();
    v.set_param("home/type", std::int64_t{1});
    v.set_param("drone/max_altitude", 30.0);
    ASSERT_TRUE(v.move_by({5, 0, 0, 0}).ok);
    bool returned = false;
    const double flight = v.model().max_flight_time;
    run_until(v, flight, [&] {
        returned = v.directive_name() == "rth";
        return returned;
    });
    EXPECT_TRUE(returned);
    EXPECT_LT(v.battery_percent(), 10.0);
    EXPECT_GT(v.battery_percent(), 9.9);
    int triggers = 0;
    for (const auto& e : v.drain_events()) triggers += e.channel == "drone/rth" && e.code == "warning";
    EXPECT_EQ(triggers, 1);
    v.halt();
    run(v, 20.0);
    EXPECT_NE(v.directive_name(), "rth");
}

TEST(Hover, ReStabilisesAfterPiloting) {
    for (auto m : kAllModels) {
        Vehicle v = hovering(m);
        open_limits(v);
        v.set_offboard(true);
        v.move_by({0, 0, 20, 0});
        run_until(v, 20.0, [&] { return v.state() == FlightState::Hovering; });
        const PilotingInput steps[] = {{0, 40, 0, 0}, {40, 0, 0, 0}, {0, 0, 0, 4}, {0, 0, 200, 0}, {-40, -40, 0, -4}};
        for (const auto& step : steps) {
            for (int i = 0; i < 400; ++i) {
                if (i % 10 == 0) v.piloting(step);
                v.tick();
            }
            v.piloting({});
            double settled = -1;
            for (int i = 0; i < 600 && settled < 0; ++i) {
                v.tick();
                if (tilt(v) < deg2rad(2) && v.plant().velocity.norm() < 0.3) settled = i * v.dt();
            }
            EXPECT_GE(settled, 0.0) << to_string(m) << " step " << step.roll << "," << step.pitch << "," << step.yaw
                                    << "," << step.gaz;
            // stays settled
            for (int i = 0; i < 400; ++i) {
                v.tick();
                ASSERT_LT(tilt(v), deg2rad(2)) << to_string(m);
                ASSERT_LT(v.plant().velocity.norm(), 0.3) << to_string(m);
            }
            EXPECT_EQ(v.state(), FlightState::Hovering);
        }
    }
}

TEST(Piloting, IgnoredWithoutOffboard) {
    Vehicle v = hovering();
    const Outcome o = v.piloting({0, 10, 0, 0});
    EXPECT_TRUE(o.warning);
    run(v, 1.0);
    EXPECT_LT(v.plant().velocity.norm(), 0.05);
}

TEST(Piloting, StaleCommandFallsBackToHover) {
    Vehicle v = hovering();
    v.set_offboard(true);
    v.piloting({0, 10, 0, 0});
    run(v, 0.2);
    EXPECT_EQ(v.state(), FlightState::Flying);
    EXPECT_EQ(v.directive_name(), "piloting");
    run(v, 0.5);
    EXPECT_EQ(v.directive_name(), "hover");
    EXPECT_EQ(v.state(), FlightState::Hovering);
}

TEST(Moves, MoveByUsesBodyFrameAtCommandTime) {
    Vehicle v = hovering(DroneModel::Anafi4k, kPi / 2);
    const Vec3 start = v.plant().position;
    ASSERT_TRUE(v.move_by({5, 0, 0, 0}).ok);
    EXPECT_EQ(v.state(), FlightState::Flying);
    ASSERT_TRUE(run_until(v, 30.0, [&] { return v.state() == FlightState::Hovering; }));
    const Vec3 d = v.plant().position - start;
    EXPECT_NEAR(d.x, 0.0, 0.1);
    EXPECT_NEAR(d.y, 5.0, 0.1);
    EXPECT_NEAR(d.z, 0.0, 0.1);
    const auto events = v.drain_events();
    ASSERT_FALSE(events.empty());
    EXPECT_EQ(events.back().channel, "drone/moveby");
    EXPECT_EQ(events.back().code, "done");
}

TEST(Moves, MoveByYawIsCounterClockwise) {
    Vehicle v = hovering();
    ASSERT_TRUE(v.move_by({0, 0, 0, 90}).ok);
    ASSERT_TRUE(run_until(v, 10.0, [&] { return v.state() == FlightState::Hovering; }));
    EXPECT_NEAR(v.plant().attitude.yaw, kPi / 2, deg2rad(2));
}

TEST(Moves, ZeroMoveCompletesImmediately) {
    Vehicle v = hovering();
    const Vec3 start = v.plant().position;
    ASSERT_TRUE(v.move_by({0, 0, 0, 0}).ok);
    EXPECT_EQ(v.state(), FlightState::Hovering);
    EXPECT_EQ(v.drain_events().back().code, "done");
    run(v, 2.0);
    EXPECT_LT((v.plant().position - start).norm(), 0.02);
}

TEST(Moves, ClimbAndReverseHeading) {
    Vehicle v = hovering();
    v.set_param("drone/max_altitude", 10.0);
    const double z0 = v.plant().position.z;
    ASSERT_TRUE(v.move_by({0, 0, 2, 180}).ok);
    ASSERT_TRUE(run_until(v, 30.0, [&] { return v.state() == FlightState::Hovering; }));
    EXPECT_NEAR(v.plant().position.z - z0, 2.0, 0.1);
    EXPECT_NEAR(std::abs(wrap_pi(v.plant().attitude.yaw)), kPi, deg2rad(2));
}

TEST(Moves, MoveToCurrentLocationCompletesImmediately) {
    Vehicle v = hovering();
    const GeoPoint here = v.location();
    ASSERT_TRUE(v.move_to({here.latitude, here.longitude, here.altitude, 0, 0}).ok);
    EXPECT_EQ(v.state(), FlightState::Hovering);
    EXPECT_EQ(v.drain_events().back().channel, "drone/moveto");
}

TEST(Moves, MoveToAltitudeClampedToDefaultCeiling) {
    Vehicle v = hovering();
    const GeoPoint here = v.location();
    EXPECT_TRUE(v.move_to({here.latitude, here.longitude, 100.0, 0, 0}).warning);
    ASSERT_TRUE(run_until(v, 30.0, [&] { return v.state() == FlightState::Hovering; }));
    EXPECT_NEAR(v.plant().position.z, 2.0, 0.1);
}

TEST(Moves, MoveByRejectedWhileBusy) {
    Vehicle v = hovering();
    ASSERT_TRUE(v.move_by({3, 0, 0, 0}).ok);
    const Outcome o = v.move_by({0, 3, 0, 0});
    EXPECT_TRUE(o.warning);
    EXPECT_EQ(o.code, "busy");
}

TEST(Moves, MoveToHeadingAndAltitude) {
    Vehicle v = hovering();
    v.set_param("drone/max_altitude", 10.0);
    const GeoPoint goal = local_to_geo(v.geo_anchor(), {6, -4, 3});
    ASSERT_TRUE(v.move_to({goal.latitude, goal.longitude, goal.altitude, 90, 3}).ok);
    ASSERT_TRUE(run_until(v, 60.0, [&] { return v.state() == FlightState::Hovering; }));
    EXPECT_LT((v.plant().position - Vec3{6, -4, 3}).norm(), 0.1);
    // heading 90 (east) is yaw -90 in the world frame
    EXPECT_NEAR(v.plant().attitude.yaw, -kPi / 2, deg2rad(2));
}

TEST(Moves, MoveToFacesTarget) {
    Vehicle v = hovering();
    const GeoPoint goal = local_to_geo(v.geo_anchor(), {0, 5, 1});
    ASSERT_TRUE(v.move_to({goal.latitude, goal.longitude, goal.altitude, 0, 1}).ok);
    ASSERT_TRUE(run_until(v, 60.0, [&] { return v.state() == FlightState::Hovering; }));
    EXPECT_NEAR(v.plant().attitude.yaw, kPi / 2, deg2rad(2));
}

TEST(Moves, TargetsClampedToGeofence) {
    Vehicle v = hovering();
    const Outcome o = v.move_by({50, 0, 100, 0});
    EXPECT_TRUE(o.warning);
    ASSERT_TRUE(run_until(v, 120.0, [&] { return v.state() == FlightState::Hovering; }));
    EXPECT_NEAR(v.plant().position.x, 10.0, 0.1);
    EXPECT_NEAR(v.plant().position.z, 2.0, 0.1);
}

TEST(Geofence, PilotingNeverLeavesTheFence) {
    for (auto m : kAllModels) {
        Vehicle v = hovering(m, 0.7);
        v.set_param("drone/max_pitch_roll", 40.0);
        v.set_param("drone/max_vertical_speed", 4.0);
        v.set_param("drone/max_distance", 30.0);
        v.set_param("drone/max_altitude", 12.0);
        v.set_offboard(true);
        const Vec3 c = v.geofence_center();
        double worst_r = 0, worst_z = 0;
        const PilotingInput pushes[] = {{0, 40, 0, 4}, {40, 0, 0, 0}, {-40, -40, 0, 4}, {0, -40, 100, 4}};
        for (const auto& p : pushes) {
            for (int i = 0; i < 2400; ++i) {
                if (i % 10 == 0) v.piloting(p);
                v.tick();
                worst_r = std::max(worst_r, horizontal_distance(v.plant().position, c));
                worst_z = std::max(worst_z, v.plant().position.z);
            }
        }
        EXPECT_LE(worst_r, 30.5) << to_string(m);
        EXPECT_LE(worst_z, 12.5) << to_string(m);
    }
}

TEST(Geofence, SticksNeverLeaveTheFence) {
    Vehicle v = hovering(DroneModel::Usa);
    v.set_param("drone/max_pitch_roll", 40.0);
    const Vec3 c = v.geofence_center();
    double worst = 0;
    for (int i = 0; i < 4000; ++i) {
        if (i % 2 == 0) v.sticks({100, 30, 100, 0, 0, 0});
        v.tick();
        worst = std::max(worst, horizontal_distance(v.plant().position, c));
        ASSERT_LE(v.plant().position.z, 2.5);
    }
    EXPECT_LE(worst, 10.5);
}

TEST(Sticks, OverrideRouteAndReleaseHovers) {
    Vehicle v = hovering();
    ASSERT_TRUE(v.move_by({8, 0, 0, 0}).ok);
    run(v, 1.0);
    v.sticks({0, 50, 0, 0, 0, 0});
    run(v, 0.3);
    EXPECT_EQ(v.directive_name(), "manual");
    EXPECT_GT(v.plant().attitude.roll, deg2rad(1));  // positive roll banks right
    v.sticks({});
    run(v, 1.0);
    EXPECT_EQ(v.directive_name(), "hover");
    EXPECT_EQ(v.state(), FlightState::Hovering);
    EXPECT_LT(v.plant().velocity.norm(), 0.3);
}

TEST(Sticks, FullScaleAndOverrideOfOffboard) {
    Vehicle v = hovering();
    v.set_param("drone/max_distance", 100.0);
    v.set_offboard(true);
    const double max_tilt = deg2rad(v.params().get_float("drone/max_pitch_roll"));
    for (int i = 0; i < 400; ++i) {
        if (i % 10 == 0) {
            v.piloting({0, 5, 0, 0});
            v.sticks({0, 50, 0, 0, 0, 0});
        }
        v.tick();
    }
    EXPECT_EQ(v.directive_name(), "manual");
    EXPECT_NEAR(v.plant().attitude.roll, 0.5 * max_tilt, 1e-3);
    EXPECT_NEAR(v.plant().attitude.pitch, 0.0, 1e-3);
    for (int i = 0; i < 300; ++i) {
        if (i % 10 == 0) v.sticks({100, 0, 0, 0, 0, 0});
        v.tick();
    }
    EXPECT_NEAR(v.plant().attitude.pitch, max_tilt, 1e-2);
}

TEST(Sticks, ButtonsAreEdgeTriggered) {
    Vehicle v = landed();
    StickInput press;
    press.takeoff_land = true;
    v.sticks(press);
    EXPECT_EQ(v.state(), FlightState::TakingOff);
    v.sticks(press);  // still held: no second toggle
    EXPECT_EQ(v.state(), FlightState::TakingOff);
    run(v, 3.0);
    v.sticks({});
    v.sticks(press);
    EXPECT_EQ(v.state(), FlightState::Landing);
}

TEST(Sticks, RangeChecked) {
    Vehicle v = landed();
    EXPECT_EQ(v.sticks({101, 0, 0, 0, 0, 0}).code, "domain");
}

TEST(FlightPlan, SquareVisitsEveryWaypointInOrder) {
    Vehicle v = landed();
    v.set_param("drone/max_altitude", 10.0);
    v.set_param("drone/max_distance", 30.0);
    v.set_param("drone/max_horizontal_speed", 5.0);
    const std::string text = square_plan(v.geo_anchor(), 20.0, 5.0);
    ASSERT_TRUE(v.flightplan_upload("sq", text).ok);
    ASSERT_TRUE(v.flightplan_start("sq").ok);
    const Vec3 corners[] = {{20, 0, 5}, {20, 20, 5}, {0, 20, 5}, {0, 0, 5}};
    std::size_t next = 0;
    for (int i = 0; i < 200 * 120 && next < 4; ++i) {
        v.tick();
        if ((v.plant().position - corners[next]).norm() < 0.5) ++next;
    }
    EXPECT_EQ(next, 4u);
    ASSERT_TRUE(run_until(v, 20.0, [&] { return v.state() == FlightState::Hovering; }));
    EXPECT_LT((v.plant().position - corners[3]).norm(), 0.1);
}

TEST(FlightPlan, PauseResumeStop) {
    Vehicle v = hovering();
    v.set_param("drone/max_distance", 20.0);
    ASSERT_TRUE(v.flightplan_upload("sq", square_plan(v.geo_anchor(), 8.0, 2.0)).ok);
    EXPECT_EQ(v.flightplan_pause().code, "invalid_state");
    ASSERT_TRUE(v.flightplan_start("sq").ok);
    run(v, 3.0);
    ASSERT_GT(v.plant().velocity.norm(), 0.5);
    const Vec3 paused_at = v.plant().position;
    ASSERT_TRUE(v.flightplan_pause().ok);
    EXPECT_EQ(v.directive_name(), "hover");
    run(v, 5.0);
    EXPECT_LT((v.plant().position - paused_at).norm(), 0.2);
    EXPECT_EQ(v.state(), FlightState::Hovering);
    ASSERT_TRUE(v.flightplan_start("sq").ok);
    EXPECT_EQ(v.directive_name(), "flightplan");
    ASSERT_TRUE(v.flightplan_stop().ok);
    EXPECT_EQ(v.directive_name(), "hover");
    EXPECT_EQ(v.flightplan_stop().code, "invalid_state");
}

TEST(FlightPlan, UploadErrors) {
    Vehicle v = landed();
    const Outcome bad = v.flightplan_upload("x", "QGC WPL 110\n0\t1\t2\n");
    EXPECT_EQ(bad.code, "parse");
    EXPECT_NE(bad.message.find("line 2"), std::string::npos);
    EXPECT_EQ(v.flightplan_start("missing").code, "unknown_uid");
}

TEST(ReturnHome, ClimbsThenReturns) {
    Vehicle v = hovering(DroneModel::Anafi4k);
    open_limits(v);
    v.set_param("home/type", std::int64_t{1});
    v.set_param("home/ending_behavior", std::int64_t{1});
    ASSERT_TRUE(v.move_by({30, -20, 4, 0}).ok);
    ASSERT_TRUE(run_until(v, 60.0, [&] { return v.state() == FlightState::Hovering; }));
    ASSERT_TRUE(v.rth().ok);
    double peak = 0;
    bool reached_altitude_before_leaving = false;
    const Vec3 away = v.plant().position;
    ASSERT_TRUE(run_until(v, 120.0, [&] {
        peak = std::max(peak, v.plant().position.z);
        if (horizontal_distance(v.plant().position, away) < 0.3 && std::abs(v.plant().position.z - 20) < 0.5) {
            reached_altitude_before_leaving = true;
        }
        return v.state() == FlightState::Hovering;
    }));
    EXPECT_TRUE(reached_altitude_before_leaving);
    EXPECT_NEAR(peak, 20.0, 0.5);
    EXPECT_LT(horizontal_distance(v.plant().position, v.geofence_center()), 0.5);
    EXPECT_NEAR(v.plant().position.z, 20.0, 0.5);
}

TEST(ReturnHome, LandsWhenConfigured) {
    Vehicle v = hovering();
    open_limits(v);
    v.set_param("home/type", std::int64_t{1});
    v.set_param("home/ending_behavior", std::int64_t{0});
    ASSERT_TRUE(v.move_by({6, 0, 0, 0}).ok);
    ASSERT_TRUE(run_until(v, 30.0, [&] { return v.state() == FlightState::Hovering; }));
    ASSERT_TRUE(v.rth().ok);
    ASSERT_TRUE(run_until(v, 120.0, [&] { return v.state() == FlightState::Landed; }));
    EXPECT_LT(horizontal_distance(v.plant().position, {0, 0, 0}), 0.5);
}

TEST(ReturnHome, HomeTypes) {
    Vehicle v = hovering();
    EXPECT_EQ(v.rth().code, "no_home");  // default type 4, no ground station
    v.set_param("home/type", std::int64_t{3});
    EXPECT_EQ(v.rth().code, "no_home");
    v.set_home(local_to_geo(v.geo_anchor(), {3, 3, 0}));
    EXPECT_TRUE(v.rth().ok);
    EXPECT_EQ(v.directive_name(), "rth");
    EXPECT_TRUE(v.navigate_home(false).ok);
    EXPECT_EQ(v.directive_name(), "hover");
}

TEST(Gimbal, PitchClampsPerModel) {
    struct Case {
        DroneModel m;
        double lo, hi;
    };
    for (const Case c : {Case{DroneModel::Ai, -116, 176}, Case{DroneModel::Anafi4k, -90, 90},
                         Case{DroneModel::Thermal, -90, 90}, Case{DroneModel::Usa, -90, 90}}) {
        Vehicle v = landed(c.m);
        auto watch = [&](double seconds) {
            for (int i = 0; i < std::lround(seconds / v.dt()); ++i) {
                v.tick();
                const double p = rad2deg(v.gimbal().relative.pitch);
                ASSERT_GE(p, c.lo - 1e-9);
                ASSERT_LE(p, c.hi + 1e-9);
            }
        };
        const Outcome up = v.gimbal_command({0, 1, 0, 200, 0});
        EXPECT_EQ(up.code, "clamped");
        watch(4.0);
        EXPECT_NEAR(rad2deg(v.gimbal().relative.pitch), c.hi, 0.01) << to_string(c.m);
        v.gimbal_command({0, 1, 0, -200, 0});
        watch(4.0);
        EXPECT_NEAR(rad2deg(v.gimbal().relative.pitch), c.lo, 0.01) << to_string(c.m);
        v.gimbal_command({0, 1, 0, 0, 0});
        watch(4.0);
        v.gimbal_command({1, 1, 0, -180, 0});  // velocity mode runs into the stop
        watch(3.0);
        EXPECT_EQ(rad2deg(v.gimbal().relative.pitch), c.lo) << to_string(c.m);
    }
}

TEST(Gimbal, PositionStepsSettleWithinOneDegree) {
    for (auto m : kAllModels) {
        Vehicle v = landed(m);
        for (double target : {-80.0, -30.0, 0.0, 45.0, 85.0}) {
            v.gimbal_command({0, 1, 0, target, 0});
            run(v, 3.0);
            EXPECT_NEAR(rad2deg(v.gimbal().relative.pitch), target, 1.0) << to_string(m);
        }
    }
}

TEST(Gimbal, AbsoluteFrameCompensatesBodyTilt) {
    Vehicle v = hovering(DroneModel::Usa);
    v.set_param("drone/max_pitch_roll", 20.0);
    v.set_param("drone/max_distance", 100.0);
    v.set_offboard(true);
    v.gimbal_command({0, 2, 0, -30, 0});
    for (int i = 0; i < 400; ++i) {
        if (i % 10 == 0) v.piloting({0, 15, 0, 0});
        v.tick();
    }
    ASSERT_GT(v.plant().attitude.pitch, deg2rad(10));
    const EulerAngles world = rotation_to_euler(v.gimbal_world()).angles;
    EXPECT_NEAR(rad2deg(world.pitch), -30.0, 1.0);
}

TEST(Gimbal, AbsoluteFrameReachesBothEndsOfAiRange) {
    Vehicle v = landed(DroneModel::Ai);
    for (double target : {176.0, -116.0, 150.0, -100.0, 0.0}) {
        v.gimbal_command({0, 2, 0, target, 0});
        run(v, 4.0);
        EXPECT_NEAR(rad2deg(v.gimbal().relative.pitch), target, 1.0);
    }
}

TEST(Gimbal, ResetWithinOneSecond) {
    for (auto m : kAllModels) {
        Vehicle v = landed(m);
        v.gimbal_command({0, 1, 20, -60, 0});
        run(v, 2.0);
        v.gimbal_reset();
        run(v, 1.0);
        const EulerAngles a = v.gimbal().relative;
        EXPECT_LT(std::max({std::abs(a.roll), std::abs(a.pitch), std::abs(a.yaw)}), deg2rad(1)) << to_string(m);
    }
}

TEST(Gimbal, FrameNoneIgnored) {
    Vehicle v = landed();
    EXPECT_TRUE(v.gimbal_command({0, 0, 0, 30, 0}).warning);
    run(v, 1.0);
    EXPECT_EQ(v.gimbal().relative.pitch, 0.0);
}

TEST(Gimbal, YawOnlyOnAi) {
    Vehicle ai = landed(DroneModel::Ai), k4 = landed(DroneModel::Anafi4k);
    ai.gimbal_command({0, 1, 0, 0, 20});
    k4.gimbal_command({0, 1, 0, 0, 20});
    run(ai, 2.0);
    run(k4, 2.0);
    EXPECT_NEAR(rad2deg(ai.gimbal().relative.yaw), 20.0, 0.5);
    EXPECT_EQ(k4.gimbal().relative.yaw, 0.0);
}

TEST(Camera, ZoomClampsToModelMaximum) {
    Vehicle v = landed(DroneModel::Usa);
    EXPECT_EQ(v.camera_command({0, 40}).code, "clamped");
    run(v, 10.0);
    EXPECT_NEAR(v.zoom(), 32.0, 1e-6);
    const double h1 = deg2rad(v.model().video_hfov_deg);
    EXPECT_NEAR(deg2rad(v.hfov_deg()), 2 * std::atan(std::tan(h1 / 2) / 32.0), 1e-9);
    v.camera_reset();
    run(v, 10.0);
    EXPECT_NEAR(v.zoom(), 1.0, 1e-6);
    EXPECT_NEAR(v.hfov_deg(), v.model().video_hfov_deg, 1e-6);
}

TEST(Camera, FieldOfViewFollowsZoom) {
    Vehicle v = landed(DroneModel::Anafi4k);
    v.camera_command({0, 2});
    run(v, 5.0);
    const double h1 = deg2rad(v.model().video_hfov_deg);
    EXPECT_NEAR(v.zoom(), 2.0, 1e-3);
    EXPECT_NEAR(deg2rad(v.hfov_deg()), 2 * std::atan(std::tan(h1 / 2) / v.zoom()), 1e-12);
    EXPECT_NEAR(std::tan(deg2rad(v.vfov_deg()) / 2) / std::tan(deg2rad(v.hfov_deg()) / 2), 9.0 / 16.0, 1e-9);
}

TEST(Camera, ZoomVelocityMode) {
    Vehicle v = landed(DroneModel::Anafi4k);
    v.set_param("camera/max_zoom_speed", 1.0);
    v.camera_command({1, 5.0});
    run(v, 1.0);
    EXPECT_NEAR(v.zoom(), 2.0, 0.01);
}

TEST(Media, PhotoNeedsPhotoMode) {
    Vehicle v = landed();
    EXPECT_EQ(v.photo_take({}).code, "mode");
    v.set_param("camera/mode", std::int64_t{1});
    const Outcome o = v.photo_take({0, 0, 2});
    ASSERT_TRUE(o.ok);
    EXPECT_EQ(o.extras["media_id"], "media-000001");
    ASSERT_EQ(v.media().size(), 1u);
    EXPECT_EQ(v.media()[0].size, 48u * 1024);
    EXPECT_EQ(v.photo_take({2, 0, 0}).extras["media_id"], "media-000002");
    EXPECT_EQ(v.media()[1].size, 10u * 16 * 1024);
    EXPECT_EQ(v.photo_stop().code, "invalid_state");
}

TEST(Media, TimeLapseUntilStopped) {
    Vehicle v = landed();
    v.set_param("camera/mode", std::int64_t{1});
    ASSERT_TRUE(v.photo_take({3, 0, 0}).ok);
    run(v, 7.0);
    EXPECT_TRUE(v.photo_stop().ok);
    EXPECT_EQ(v.media().size(), 4u);  // t = 0, 2, 4, 6
    run(v, 4.0);
    EXPECT_EQ(v.media().size(), 4u);
}

TEST(Media, RecordingGrowsAndBlocksStorage) {
    Vehicle v = landed();
    EXPECT_TRUE(v.recording_start(0).ok);
    EXPECT_EQ(v.recording_start(0).code, "busy");
    EXPECT_EQ(v.set_param("camera/mode", std::int64_t{1}).code, "busy");
    run(v, 2.0);
    std::vector<MediaRecord> out;
    EXPECT_EQ(v.storage_download(false, out, 1 << 20).code, "busy");
    EXPECT_EQ(v.storage_format().code, "busy");
    EXPECT_TRUE(v.recording_stop().ok);
    EXPECT_NEAR(static_cast<double>(v.media()[0].size), 2.0 * 8192, 64);
}

TEST(Media, RecordingStopsWhenStorageFull) {
    VehicleConfig c;
    c.storage_capacity = 20000;
    Vehicle v(c);
    v.mark_ready();
    v.tick();
    ASSERT_TRUE(v.recording_start(0).ok);
    run(v, 4.0);
    EXPECT_FALSE(v.recording());
    EXPECT_LE(v.storage_available(), 20000u);
    bool saw = false;
    for (const auto& e : v.drain_events()) saw = saw || e.code == "storage";
    EXPECT_TRUE(saw);
    v.set_param("camera/mode", std::int64_t{1});
    EXPECT_EQ(v.photo_take({0, 0, 2}).code, "storage");
}

TEST(Media, DownloadBudgetAndDelete) {
    Vehicle v = landed();
    v.set_param("camera/mode", std::int64_t{1});
    for (int i = 0; i < 5; ++i) ASSERT_TRUE(v.photo_take({0, 0, 0}).ok);
    std::vector<MediaRecord> out;
    const Outcome first = v.storage_download(true, out, 3 * 16 * 1024);
    ASSERT_TRUE(first.ok);
    EXPECT_EQ(out.size(), 3u);
    EXPECT_EQ(first.extras["remaining"], 2);
    EXPECT_EQ(v.media().size(), 2u);
    EXPECT_EQ(media_bytes(out[0]).size(), out[0].size);
    EXPECT_EQ(media_bytes(out[0]), media_bytes(out[0]));
    EXPECT_NE(media_bytes(out[0]), media_bytes(out[1]));
    ASSERT_TRUE(v.storage_format().ok);
    EXPECT_TRUE(v.media().empty());
    EXPECT_EQ(v.storage_available(), v.config().storage_capacity);
}

TEST(Parameters, ErrorsMapToCodes) {
    Vehicle v = landed();
    EXPECT_EQ(v.set_param("nope", true).code, "unknown_name");
    EXPECT_EQ(v.set_param("camera/hdr", 1.0).code, "type_mismatch");
    EXPECT_EQ(v.set_param("home/type", std::int64_t{2}).code, "domain");
    EXPECT_EQ(v.set_param("drone/model", std::string("x")).code, "read_only");
    EXPECT_TRUE(v.set_param("drone/max_pitch_roll", 50.0).ok);
    EXPECT_EQ(v.params().get_float("drone/max_pitch_roll"), 40.0);
}

TEST(Determinism, IdenticalRuns) {
    auto trace = [] {
        Vehicle v = hovering(DroneModel::Ai);
        open_limits(v);
        v.set_offboard(true);
        std::vector<PlantState> out;
        for (int i = 0; i < 4000; ++i) {
            if (i % 10 == 0) v.piloting({std::sin(i * 0.001) * 20, 10, 30, 1});
            v.tick();
            out.push_back(v.plant());
        }
        return out;
    };
    EXPECT_EQ(trace(), trace());
}
