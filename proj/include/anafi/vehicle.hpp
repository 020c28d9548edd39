// One simulated drone: flight state machine, piloting modes, gimbal, camera,
// battery, storage, flight plans and return-to-home on top of the flight
// dynamics. Everything advances only inside tick(); requests are plain method
// calls made by the owner between ticks.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "anafi/flight_dynamics.hpp"
#include "anafi/geo.hpp"
#include "anafi/mission.hpp"
#include "anafi/model_params.hpp"
#include "anafi/parameters.hpp"
#include "anafi/trajectory.hpp"

namespace anafi {

enum class FlightState { Connecting, Landed, TakingOff, Hovering, Flying, Landing, Emergency, Disconnected };

std::string_view to_string(FlightState s);
bool transition_allowed(FlightState from, FlightState to);

// Wire-unit inputs (degrees, m, m/s) as carried by the command messages.
struct PilotingInput {
    double roll{0.0};   // deg
    double pitch{0.0};  // deg
    double yaw{0.0};    // deg/s
    double gaz{0.0};    // m/s
};

struct StickInput {
    int x{0}, y{0}, z{0}, yaw{0}, camera{0}, zoom{0};  // percent, [-100, 100]
    bool return_home{false};
    bool takeoff_land{false};
    bool reset_camera{false};
    bool reset_zoom{false};

    bool axes_zero() const { return x == 0 && y == 0 && z == 0 && yaw == 0; }
    bool operator==(const StickInput&) const = default;
};

struct MoveByInput {
    double dx{0.0}, dy{0.0}, dz{0.0};  // m, body frame at command time
    double dyaw{0.0};                  // deg, positive counter-clockwise
};

struct MoveToInput {
    double latitude{0.0};
    double longitude{0.0};
    double altitude{0.0};
    double heading{0.0};  // deg from north, clockwise
    int orientation_mode{0};
};

struct GimbalInput {
    int mode{0};   // 0 position, 1 velocity
    int frame{1};  // 0 none, 1 relative, 2 absolute
    double roll{0.0}, pitch{0.0}, yaw{0.0};  // deg or deg/s
};

struct CameraInput {
    int mode{0};  // 0 level, 1 velocity
    double zoom{1.0};
};

struct PhotoInput {
    int mode{0};  // 0 single, 1 bracketing, 2 burst, 3 time-lapse, 4 GPS-lapse
    int photo_format{0};
    int file_format{0};  // 0 jpeg, 1 dng, 2 both
};

struct PoiInput {
    double latitude{0.0}, longitude{0.0}, altitude{0.0};
    bool locked_gimbal{false};
};

struct MediaRecord {
    std::string id;
    std::string kind;    // "photo" or "video"
    std::string format;  // "jpeg", "dng", "jpeg+dng", "mp4"
    int mode{0};
    std::uint64_t size{0};
    std::uint64_t stamp_ns{0};  // sim time of capture start

    bool operator==(const MediaRecord&) const = default;
};

/// Deterministic placeholder content for a media record.
std::string media_bytes(const MediaRecord& record);

/// Result of a request. Errors carry a short machine code.
struct Outcome {
    bool ok{true};
    bool warning{false};  // accepted or ignored, but the caller should be told
    std::string code;
    std::string message;
    nlohmann::json extras = nlohmann::json::object();
    double defer_s{0.0};  // reply only after this much simulated time

    static Outcome success(std::string message = "", nlohmann::json extras = nlohmann::json::object());
    static Outcome failure(std::string code, std::string message);
    static Outcome warn(std::string code, std::string message);
};

/// Asynchronous notices (directive finished, auto RTH, geofence clamps).
struct VehicleEvent {
    std::string channel;
    std::string code;
    std::string message;
};

struct VehicleConfig {
    std::string name{"anafi"};
    DroneModel model{DroneModel::Anafi4k};
    GeoPoint start{48.8784, 2.3677, 0.0};
    double initial_yaw{0.0};  // rad
    std::optional<GeoPoint> ground_station;
    double tick_rate{200.0};
    bool require_arming{false};
    std::uint64_t storage_capacity{32ull << 30};
    int link_quality{5};
    double takeoff_altitude{1.0};
};

struct GimbalStatus {
    EulerAngles relative;  // rad, relative to the body
    int mode{0};
    int frame{1};
};

class Vehicle {
public:
    explicit Vehicle(VehicleConfig config);

    // lifecycle
    void tick();
    void mark_ready();  // CONNECTING -> LANDED once the endpoint is up

    // services
    Outcome takeoff();
    Outcome land();
    Outcome emergency();
    Outcome halt();
    Outcome arm(bool on);
    Outcome calibrate();
    Outcome reboot();
    Outcome rth();
    Outcome navigate_home(bool start);
    Outcome set_home(const GeoPoint& location);
    Outcome set_offboard(bool on);
    Outcome piloted_poi(const PoiInput& poi);

    Outcome photo_take(const PhotoInput& req);
    Outcome photo_stop();
    Outcome recording_start(int mode);
    Outcome recording_stop();
    Outcome camera_reset();
    Outcome gimbal_reset();
    Outcome gimbal_calibrate();

    Outcome flightplan_upload(const std::string& uid, std::string_view text);
    Outcome flightplan_start(const std::string& uid);
    Outcome flightplan_pause();
    Outcome flightplan_stop();

    /// Records returned in capture order, up to `budget` bytes of content.
    Outcome storage_download(bool delete_after, std::vector<MediaRecord>& out, std::uint64_t budget);
    Outcome storage_format();

    // command topics
    Outcome piloting(const PilotingInput& cmd);
    Outcome sticks(const StickInput& input);
    Outcome move_by(const MoveByInput& cmd);
    Outcome move_to(const MoveToInput& cmd);
    Outcome gimbal_command(const GimbalInput& cmd);
    Outcome camera_command(const CameraInput& cmd);

    // parameters
    Outcome set_param(std::string_view name, const ParamValue& value);
    const ParameterStore& params() const { return params_; }

    std::vector<VehicleEvent> drain_events();

    // observation
    const std::string& name() const { return config_.name; }
    const ModelParams& model() const { return *model_; }
    const VehicleConfig& config() const { return config_; }
    FlightState state() const { return state_; }
    const PlantState& plant() const { return dynamics_.state(); }
    std::uint64_t ticks() const { return ticks_; }
    double dt() const { return dt_; }
    double sim_time() const { return static_cast<double>(ticks_) * dt_; }
    bool offboard() const { return offboard_; }
    bool armed() const { return armed_; }
    bool airborne() const;

    double battery_percent() const { return battery_; }
    double battery_voltage() const;
    int battery_health() const { return 100; }

    const GimbalStatus& gimbal() const { return gimbal_; }
    RotationMatrix gimbal_world() const;
    double zoom() const { return zoom_; }
    double hfov_deg() const;
    double vfov_deg() const;
    bool recording() const { return recording_.has_value(); }
    std::uint64_t storage_available() const;
    const std::vector<MediaRecord>& media() const { return media_; }

    GeoPoint location() const;
    double altitude_above_takeoff() const { return plant().position.z - takeoff_z_; }
    int link_quality() const { return config_.link_quality; }
    const StickInput& stick_state() const;
    std::optional<GeoPoint> home() const;
    Vec3 geofence_center() const { return fence_center_; }
    const GeoPoint& geo_anchor() const { return config_.start; }
    bool directive_active() const { return mode_ == Mode::Route || mode_ == Mode::Piloting; }
    std::string_view directive_name() const;
    const std::map<std::string, FlightPlan>& plans() const { return plans_; }

private:
    enum class Mode { Idle, Hover, Piloting, Manual, Route };
    enum class RouteKind { MoveBy, MoveTo, Rth, Plan };
    enum class YawGoal { Keep, Delta, Heading, FaceTarget };
    enum class EndAction { Hover, Land };

    struct Goal {
        Vec3 target;
        YawGoal yaw_goal{YawGoal::Keep};
        double yaw_value{0.0};  // rad
        bool yaw_first{false};
    };

    struct Route {
        RouteKind kind;
        std::vector<Goal> goals;
        std::size_t cursor{0};
        std::optional<Leg> leg;
        double leg_time{0.0};
        EndAction end{EndAction::Hover};
        std::string plan_uid;
    };

    struct HoverHold {
        std::optional<Vec3> anchor;
        std::optional<double> anchor_z;
        double yaw{0.0};
    };

    struct Recording {
        std::size_t index;  // into media_
        double started;
        double bytes;
    };

    struct Lapse {
        PhotoInput req;
        double next_time{0.0};
        Vec3 last_position;
        std::string first_id;
    };

    void set_state(FlightState next);
    void emit(std::string channel, std::string code, std::string message);
    void enter_hover();
    void start_route(Route route);
    void finish_route();
    void begin_leg();
    MotionLimits motion_limits() const;
    CommandLimits command_limits() const;
    Vec3 clamp_to_fence(const Vec3& target, bool& clamped) const;

    VirtualCommand control_step();
    VirtualCommand hover_command();
    VirtualCommand track(const Leg& leg, double t);
    VirtualCommand accel_to_command(const Vec3& accel, double vz, double yaw_rate) const;
    VirtualCommand piloting_command(const PilotingInput& p) const;
    VirtualCommand stick_command(const StickInput& s) const;
    VirtualCommand guard(const VirtualCommand& cmd);
    bool sticks_fresh() const;

    void update_gimbal();
    void update_camera();
    void update_battery();
    void update_storage();
    std::optional<std::string> capture(const PhotoInput& req, std::string& error);
    std::string next_media_id();
    void stop_recording_internal();
    void handle_buttons(const StickInput& now, const StickInput& before);
    void aim_at_poi();

    VehicleConfig config_;
    const ModelParams* model_;
    double dt_;
    FlightDynamics dynamics_;
    ParameterStore params_;

    FlightState state_{FlightState::Connecting};
    std::uint64_t ticks_{0};
    bool ready_{false};
    bool armed_{false};
    bool offboard_{false};
    double reboot_until_{-1.0};
    double calibrating_until_{-1.0};

    Mode mode_{Mode::Idle};
    HoverHold hover_;
    std::optional<Route> route_;
    std::optional<Route> paused_plan_;
    bool plan_after_takeoff_{false};
    std::string pending_plan_;
    PilotingInput pilot_{};
    double pilot_time_{-1e9};
    StickInput stick_{};
    double stick_time_{-1e9};

    Vec3 fence_center_;
    double takeoff_z_{0.0};
    std::optional<GeoPoint> takeoff_point_;
    std::optional<GeoPoint> custom_home_;
    std::optional<PoiInput> poi_;

    double battery_{100.0};
    bool low_battery_fired_{false};

    GimbalStatus gimbal_;
    EulerAngles gimbal_target_;  // rad (position) or rad/s (velocity)
    bool gimbal_stick_{false};

    double zoom_{1.0};
    double zoom_target_{1.0};
    bool zoom_velocity_{false};
    double zoom_rate_{0.0};

    std::vector<MediaRecord> media_;
    std::uint64_t media_counter_{0};
    std::optional<Recording> recording_;
    bool autorecording_{false};
    std::optional<Lapse> lapse_;

    std::map<std::string, FlightPlan> plans_;
    std::vector<VehicleEvent> events_;
};

}  // namespace anafi
