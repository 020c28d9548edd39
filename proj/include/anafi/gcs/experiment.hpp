// Step-response experiments against one drone: a declarative spec is turned
// into a timeline of stamped requests, sent ahead of time, and the resulting
// telemetry is joined into 30 Hz rows.
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "anafi/gcs/client.hpp"
#include "anafi/geometry.hpp"
#include "anafi/model_params.hpp"

namespace anafi::gcs {

struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Signal { Pitch, Roll, Yaw, Vertical, Gimbal };

std::string_view to_string(Signal s);

struct Segment {
    enum class Level { Value, RangeMax, RangeMin };
    Level level{Level::Value};
    double value{0.0};     // deg, deg/s or m/s
    double duration{0.0};  // s
};

struct ExperimentSpec {
    std::string name;
    Signal signal{Signal::Pitch};
    std::string channel;  // drone/command or gimbal/command
    std::vector<Segment> segments;
    int gimbal_mode{0};   // 0 position, 1 velocity
    int gimbal_frame{1};  // 1 relative, 2 absolute
    bool gimbal_roll{false};  // drive roll instead of pitch
    double altitude{10.0};

    double duration() const;
};

/// Accepts either {amplitude, hold, rest} (+A for hold, -A for hold, zero for
/// rest) or an explicit "segments" list of [value, seconds] pairs, where value
/// may be "max" or "min" for the gimbal pitch range.
ExperimentSpec parse_experiment_spec(const nlohmann::json& doc);
ExperimentSpec load_experiment_spec(const std::string& path);

/// Segments with range levels replaced by the model's gimbal pitch limits.
std::vector<Segment> resolve_segments(const ExperimentSpec& spec, const ModelParams& model);

struct Sample {
    double t;     // s since the window opened
    double cmd;   // commanded value in effect
    double meas;  // measured counterpart of cmd
    double vx, vy, vz;  // m/s in the heading frame (x forward, y left, z up)
    double z;
    double roll, pitch, yaw;  // deg, yaw unwrapped
    std::uint64_t stamp;      // sim ns
};

/// Raw 5 Hz readings (deg) of the driven gimbal axis, for settling analysis.
struct GimbalReading {
    double t;
    double angle;
};

struct ExperimentResult {
    std::string name;
    std::string model;
    Signal signal;
    std::vector<Segment> segments;  // resolved
    std::vector<Sample> samples;
    std::vector<GimbalReading> gimbal;
    std::uint64_t window_stamp{0};

    void write_csv(std::ostream& out) const;
    std::string csv() const;
};

struct RunOptions {
    std::optional<std::chrono::milliseconds> timeout;  // wall clock; derived from the factor when unset
    std::function<void(const std::string&)> log;
};

/// Takes off from LANDED, climbs to the spec altitude, runs the window, lands
/// and waits for LANDED again so consecutive runs start from the same state.
ExperimentResult run_experiment(DroneClient& client, const ExperimentSpec& spec, const RunOptions& options = {});

// Analysis helpers shared by the CLI summary and the acceptance checks.

double peak_horizontal_speed(const std::vector<Sample>& samples, double from = 0.0, double to = 1e300);

/// Linear interpolation of `field` at time t.
double value_at(const std::vector<Sample>& samples, double Sample::*field, double t);

/// First time >= `from` at which |field| reaches `threshold`, interpolated
/// between rows; nullopt when never reached.
std::optional<double> first_crossing(const std::vector<Sample>& samples, double Sample::*field, double threshold,
                                     double from = 0.0);

/// Time after `from` at which |reading - target| falls to `tolerance` and stays
/// there until `to`. Between two readings the error is interpolated
/// geometrically, matching a first-order approach. nullopt when it never
/// settles.
std::optional<double> settling_time(const std::vector<GimbalReading>& readings, double target, double tolerance,
                                    double from, double to);

/// Gimbal pitch in the vertical plane of the heading, continuous past +-90 deg.
double gimbal_pitch_deg(const Quaternion& q, double heading_rad);
/// Gimbal roll about its own optical axis, relative to the horizon.
double gimbal_roll_deg(const Quaternion& q);

}  // namespace anafi::gcs
