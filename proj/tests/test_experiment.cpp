#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "anafi/gcs/experiment.hpp"
#include "anafi/simd/daemon.hpp"

using namespace anafi;
using namespace anafi::gcs;
using nlohmann::json;

namespace {

Sample row(double t, double vx, double vz = 0.0) {
    Sample s{};
    s.t = t;
    s.vx = vx;
    s.vz = vz;
    return s;
}

}  // namespace

TEST(Spec, AmplitudeExpandsToStepReverseZero) {
    const auto spec = parse_experiment_spec(json::parse(R"({"signal": "roll", "amplitude": 40})"));
    EXPECT_EQ(spec.channel, "drone/command");
    ASSERT_EQ(spec.segments.size(), 3u);
    EXPECT_EQ(spec.segments[0].value, 40);
    EXPECT_EQ(spec.segments[1].value, -40);
    EXPECT_EQ(spec.segments[2].value, 0);
    EXPECT_EQ(spec.segments[0].duration, 2);
    EXPECT_EQ(spec.duration(), 8);
}

TEST(Spec, RangeLevelsResolvePerModel) {
    const auto spec = parse_experiment_spec(
        json::parse(R"({"signal": "gimbal", "segments": [["max", 2], ["min", 2], [5, 1]]})"));
    const auto ai = resolve_segments(spec, model_params(DroneModel::Ai));
    EXPECT_NEAR(ai[0].value, 176, 1e-9);
    EXPECT_NEAR(ai[1].value, -116, 1e-9);
    EXPECT_EQ(ai[2].value, 5);
    const auto usa = resolve_segments(spec, model_params(DroneModel::Usa));
    EXPECT_NEAR(usa[0].value, 90, 1e-9);
    const auto roll = parse_experiment_spec(
        json::parse(R"({"signal": "gimbal", "axis": "roll", "segments": [["max", 2]]})"));
    EXPECT_NEAR(resolve_segments(roll, model_params(DroneModel::Anafi4k))[0].value, 35, 1e-9);
}

TEST(Spec, Rejections) {
    for (const char* bad : {
             R"({"signal": "pitch"})",
             R"({"signal": "warp", "amplitude": 1})",
             R"({"signal": "pitch", "amplitude": 1, "colour": 2})",
             R"({"signal": "pitch", "amplitude": 1, "channel": "gimbal/command"})",
             R"({"signal": "pitch", "segments": [["max", 1]]})",
             R"({"signal": "pitch", "segments": [[1, -1]]})",
             R"({"signal": "pitch", "amplitude": 1, "segments": [[1, 1]]})",
             R"({"signal": "pitch", "amplitude": 1, "axis": "roll"})",
             R"({"signal": "gimbal", "segments": [[1, 1]], "gimbal_mode": "spin"})",
             R"({"signal": "pitch", "amplitude": 1, "altitude": 500})",
         }) {
        EXPECT_THROW(parse_experiment_spec(json::parse(bad)), ExperimentError) << bad;
    }
}

TEST(Csv, HeaderIsStable) {
    ExperimentResult r;
    r.samples.push_back(row(0.0, 1.5));
    std::istringstream in(r.csv());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "t,cmd,meas,vx,vy,vz,z");
}

TEST(Analysis, FirstCrossingInterpolates) {
    const std::vector<Sample> s{row(0.0, 0, 0), row(0.1, 0, 0.1), row(0.2, 0, 0.3), row(0.3, 0, 1.0)};
    const auto t = first_crossing(s, &Sample::vz, 0.2);
    ASSERT_TRUE(t);
    EXPECT_NEAR(*t, 0.15, 1e-12);
    EXPECT_FALSE(first_crossing(s, &Sample::vz, 2.0));
    EXPECT_NEAR(value_at(s, &Sample::vz, 0.25), 0.65, 1e-12);
}

TEST(Analysis, PeakHorizontalSpeed) {
    std::vector<Sample> s{row(0, 3), row(1, -7), row(2, 5)};
    s[2].vy = 5;
    EXPECT_NEAR(peak_horizontal_speed(s), 7.0710678118654755, 1e-12);
    EXPECT_NEAR(peak_horizontal_speed(s, 0.0, 1.5), 7.0, 1e-12);
}

TEST(Analysis, SettlingRecoversExponentialExactly) {
    // oracle: e(t) = 10 exp(-t / tau) reaches 1 deg at tau ln 10
    for (double tau : {0.1, 0.2, 0.37}) {
        std::vector<GimbalReading> r;
        for (double t = 0; t < 3.0; t += 0.2) r.push_back({t, 30.0 - 10.0 * std::exp(-t / tau)});
        const auto st = settling_time(r, 30.0, 1.0, 0.0, 3.0);
        ASSERT_TRUE(st);
        EXPECT_NEAR(*st, tau * std::log(10.0), 1e-9) << tau;
    }
    std::vector<GimbalReading> never{{0, 0}, {0.2, 5}, {0.4, 8}};
    EXPECT_FALSE(settling_time(never, 10.0, 1.0, 0.0, 1.0));
}

TEST(Analysis, GimbalPitchContinuousPastVertical) {
    for (double heading : {0.0, 1.0, -2.5}) {
        for (double pitch : {-116.0, -90.0, -30.0, 0.0, 45.0, 100.0, 176.0}) {
            // compose heading then gimbal pitch, as a world attitude
            const Quaternion q = euler_to_quaternion(
                rotation_to_euler(euler_to_rotation({0.0, 0.0, heading}) * euler_to_rotation({0.0, deg2rad(pitch), 0.0}))
                    .angles);
            EXPECT_NEAR(gimbal_pitch_deg(q, heading), pitch, 1e-9) << heading << " " << pitch;
        }
    }
}

TEST(EndToEnd, PitchStepProducesRows) {
    simd::FleetConfig c;
    c.base_port = 0;
    c.realtime_factor = 0;
    c.drones.push_back({"alpha", DroneModel::Anafi4k, {}, 0, std::nullopt});
    simd::Daemon d(c);
    d.start();
    DroneClient client("127.0.0.1", d.port(0));
    const auto r = run_experiment(client, parse_experiment_spec(json::parse(R"({"signal": "pitch", "amplitude": 40})")));
    EXPECT_EQ(r.model, "4k");
    EXPECT_EQ(r.samples.size(), 240u);  // 8 s at 30 Hz
    EXPECT_GE(peak_horizontal_speed(r.samples, 0.0, 2.0), 8.0);
    for (std::size_t i = 1; i < r.samples.size(); ++i) {
        EXPECT_NEAR(r.samples[i].t - r.samples[i - 1].t, 1.0 / 30.0, 0.006);
    }
    EXPECT_EQ(r.samples.front().cmd, 40);
    EXPECT_EQ(r.samples.back().cmd, 0);
    // the drone is back on the ground and a second run starts from the same state
    const auto again =
        run_experiment(client, parse_experiment_spec(json::parse(R"({"signal": "pitch", "amplitude": 40})")));
    ASSERT_EQ(again.samples.size(), r.samples.size());
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        EXPECT_EQ(again.samples[i].vx, r.samples[i].vx);
        EXPECT_EQ(again.samples[i].meas, r.samples[i].meas);
    }
}
