#include "anafi/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace anafi {

namespace {

constexpr double kStale = 0.5;             // s without refresh before a stream is dropped
constexpr double kPosGain = 1.5;           // 1/s^2
constexpr double kVelGain = 2.2;           // 1/s
constexpr double kBrakeGain = 3.5;         // 1/s
constexpr double kAltGain = 1.5;           // 1/s
constexpr double kYawGain = 2.0;           // 1/s
constexpr double kSettledSpeed = 0.15;      // m/s, hover anchor capture
constexpr double kFenceMargin = 0.3;       // m
constexpr double kZoomTau = 0.3;           // s
constexpr double kVideoRate = 8192.0;      // B/s
constexpr double kTimeLapsePeriod = 2.0;   // s
constexpr double kGpsLapseDistance = 10.0; // m

const char* kStateNames[] = {"CONNECTING", "LANDED",    "TAKINGOFF", "HOVERING",
                             "FLYING",     "LANDING",   "EMERGENCY", "DISCONNECTED"};

double horizontal_norm(const Vec3& v) { return std::hypot(v.x, v.y); }

// Time for a vertical-speed command to show up: transport delay plus the
// speed loop's own time constant.
double vertical_lead(const ModelParams& m) { return m.vertical_delay + 1.0 / m.vertical_kp; }

// Where the vehicle will be once the attitude it already has has taken effect.
// Feeding the outer loops this state instead of the measured one cancels the
// attitude lag, so their gains behave as designed on every model.
struct Lookahead {
    Vec3 position;
    Vec3 velocity;
};

Lookahead look_ahead(const PlantState& s, const ModelParams& m) {
    const double tau = m.attitude_time_constant;
    const Vec3 up = euler_to_rotation(s.attitude) * Vec3{0.0, 0.0, 1.0};
    const double lift = kGravity / std::max(up.z, 0.2);
    const double speed = horizontal_norm(s.velocity);
    const Vec3 accel{up.x * lift - m.drag_coefficient * speed * s.velocity.x,
                     up.y * lift - m.drag_coefficient * speed * s.velocity.y, 0.0};
    const double lead = vertical_lead(m);
    return {
        {s.position.x + s.velocity.x * tau, s.position.y + s.velocity.y * tau, s.position.z + s.velocity.z * lead},
        {s.velocity.x + accel.x * tau, s.velocity.y + accel.y * tau, s.velocity.z},
    };
}

std::string state_error(FlightState s, std::string_view what) {
    return std::string(what) + " not allowed in state " + std::string(to_string(s));
}

}  // namespace

std::string_view to_string(FlightState s) { return kStateNames[static_cast<int>(s)]; }

bool transition_allowed(FlightState from, FlightState to) {
    using S = FlightState;
    if (to == S::Emergency || to == S::Disconnected) return true;
    switch (from) {
    case S::Connecting: return to == S::Landed;
    case S::Landed: return to == S::TakingOff;
    case S::TakingOff: return to == S::Hovering || to == S::Landing;
    case S::Hovering: return to == S::Flying || to == S::Landing;
    case S::Flying: return to == S::Hovering || to == S::Landing;
    case S::Landing: return to == S::Landed;
    case S::Emergency: return false;
    case S::Disconnected: return to == S::Connecting;
    }
    return false;
}

std::string media_bytes(const MediaRecord& record) {
    std::string out(record.size, '\0');
    const std::string seed = record.id + "/" + record.format + "/";
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = seed[i % seed.size()] ^ static_cast<char>((i / seed.size()) & 0x7f);
    }
    return out;
}

Outcome Outcome::success(std::string message, nlohmann::json extras) {
    Outcome o;
    o.message = std::move(message);
    o.extras = std::move(extras);
    return o;
}

Outcome Outcome::failure(std::string code, std::string message) {
    Outcome o;
    o.ok = false;
    o.code = std::move(code);
    o.message = std::move(message);
    return o;
}

Outcome Outcome::warn(std::string code, std::string message) {
    Outcome o;
    o.warning = true;
    o.code = std::move(code);
    o.message = std::move(message);
    return o;
}

Vehicle::Vehicle(VehicleConfig config)
    : config_(std::move(config)),
      model_(&model_params(config_.model)),
      dt_(1.0 / config_.tick_rate),
      dynamics_(*model_, dt_),
      params_(model_->model_name) {
    dynamics_.reset({0, 0, 0}, config_.initial_yaw);
    dynamics_.set_tilt_rate_limit(deg2rad(params_.get_float("drone/max_pitch_roll_rate")));
}

bool Vehicle::airborne() const {
    switch (state_) {
    case FlightState::TakingOff:
    case FlightState::Hovering:
    case FlightState::Flying:
    case FlightState::Landing: return true;
    case FlightState::Emergency: return plant().position.z > 0.0;
    default: return false;
    }
}

void Vehicle::set_state(FlightState next) {
    if (next == state_) return;
    if (!transition_allowed(state_, next)) {
        throw std::logic_error("illegal flight state transition " + std::string(to_string(state_)) + " -> " +
                               std::string(to_string(next)));
    }
    state_ = next;
}

void Vehicle::emit(std::string channel, std::string code, std::string message) {
    events_.push_back({std::move(channel), std::move(code), std::move(message)});
}

std::vector<VehicleEvent> Vehicle::drain_events() {
    std::vector<VehicleEvent> out;
    out.swap(events_);
    return out;
}

void Vehicle::mark_ready() { ready_ = true; }

std::string_view Vehicle::directive_name() const {
    switch (mode_) {
    case Mode::Idle: return "none";
    case Mode::Hover: return "hover";
    case Mode::Piloting: return "piloting";
    case Mode::Manual: return "manual";
    case Mode::Route:
        switch (route_->kind) {
        case RouteKind::MoveBy: return "moveby";
        case RouteKind::MoveTo: return "moveto";
        case RouteKind::Rth: return "rth";
        case RouteKind::Plan: return "flightplan";
        }
    }
    return "none";
}

// ---------------------------------------------------------------- limits

CommandLimits Vehicle::command_limits() const {
    return {
        deg2rad(params_.get_float("drone/max_pitch_roll")),
        params_.get_float("drone/max_vertical_speed"),
        deg2rad(params_.get_float("drone/max_yaw_rate")),
    };
}

MotionLimits Vehicle::motion_limits() const {
    const CommandLimits c = command_limits();
    MotionLimits m{params_.get_float("drone/max_horizontal_speed"), c.max_vertical_speed, c.max_yaw_rate};
    // keep the profile acceleration inside what the tilt limit can deliver
    m.horizontal_accel = std::min(m.horizontal_accel, 0.5 * kGravity * std::tan(c.max_tilt));
    return m;
}

Vec3 Vehicle::clamp_to_fence(const Vec3& target, bool& clamped) const {
    clamped = false;
    Vec3 t = target;
    const double max_alt = params_.get_float("drone/max_altitude");
    const double max_dist = params_.get_float("drone/max_distance");
    if (t.z > max_alt) {
        t.z = max_alt;
        clamped = true;
    }
    if (t.z < 0.3) {
        t.z = 0.3;
        clamped = true;
    }
    const Vec3 d{t.x - fence_center_.x, t.y - fence_center_.y, 0.0};
    const double r = horizontal_norm(d);
    if (r > max_dist) {
        t.x = fence_center_.x + d.x * (max_dist / r);
        t.y = fence_center_.y + d.y * (max_dist / r);
        clamped = true;
    }
    return t;
}

// ---------------------------------------------------------------- control laws

VirtualCommand Vehicle::accel_to_command(const Vec3& accel, double vz, double yaw_rate) const {
    const double yaw = plant().attitude.yaw;
    const double max_tilt = command_limits().max_tilt;
    double ax = accel.x, ay = accel.y;
    const double amax = kGravity * std::tan(max_tilt);
    const double mag = std::hypot(ax, ay);
    if (mag > amax) {
        ax *= amax / mag;
        ay *= amax / mag;
    }
    const double fwd = std::cos(yaw) * ax + std::sin(yaw) * ay;
    const double left = -std::sin(yaw) * ax + std::cos(yaw) * ay;
    const double pitch = std::atan(fwd / kGravity);
    const double roll = std::atan(-left * std::cos(pitch) / kGravity);
    return {vz, roll, pitch, yaw_rate};
}

VirtualCommand Vehicle::hover_command() {
    const PlantState& s = plant();
    const Lookahead ahead = look_ahead(s, *model_);
    if (!hover_.anchor && horizontal_norm(ahead.velocity) < kSettledSpeed) {
        hover_.anchor = Vec3{ahead.position.x, ahead.position.y, 0.0};
    }
    if (!hover_.anchor_z && std::abs(s.velocity.z) < kSettledSpeed) {
        hover_.anchor_z = ahead.position.z;
    }
    Vec3 accel;
    if (hover_.anchor) {
        accel = Vec3{(hover_.anchor->x - ahead.position.x) * kPosGain - ahead.velocity.x * kVelGain,
                     (hover_.anchor->y - ahead.position.y) * kPosGain - ahead.velocity.y * kVelGain, 0.0};
    } else {
        accel = Vec3{-ahead.velocity.x * kBrakeGain, -ahead.velocity.y * kBrakeGain, 0.0};
    }
    const double vz = hover_.anchor_z ? kAltGain * (*hover_.anchor_z - ahead.position.z) : 0.0;
    return accel_to_command(accel, vz, 0.0);
}

VirtualCommand Vehicle::track(const Leg& leg, double t) {
    const PlantState& s = plant();
    const Lookahead ahead = look_ahead(s, *model_);
    const Reference ref = leg.at(t + model_->attitude_time_constant);
    const Reference ref_z = leg.at(t + vertical_lead(*model_));
    const Reference ref_now = leg.at(t);
    const double k = model_->drag_coefficient;
    const double speed = horizontal_norm(s.velocity);
    const Vec3 accel{
        ref.acceleration.x + kPosGain * (ref.position.x - ahead.position.x) +
            kVelGain * (ref.velocity.x - ahead.velocity.x) + k * speed * s.velocity.x,
        ref.acceleration.y + kPosGain * (ref.position.y - ahead.position.y) +
            kVelGain * (ref.velocity.y - ahead.velocity.y) + k * speed * s.velocity.y,
        0.0,
    };
    const double vz = ref_z.velocity.z + kAltGain * (ref_z.position.z - ahead.position.z);
    const double yaw_rate = ref_now.yaw_rate + kYawGain * wrap_pi(ref_now.yaw - s.attitude.yaw);
    return accel_to_command(accel, vz, yaw_rate);
}

VirtualCommand Vehicle::piloting_command(const PilotingInput& p) const {
    return {p.gaz, deg2rad(p.roll), deg2rad(p.pitch), deg2rad(p.yaw)};
}

VirtualCommand Vehicle::stick_command(const StickInput& s) const {
    const CommandLimits lim = command_limits();
    return {
        s.z / 100.0 * lim.max_vertical_speed,
        s.y / 100.0 * lim.max_tilt,
        s.x / 100.0 * lim.max_tilt,
        -s.yaw / 100.0 * lim.max_yaw_rate,  // stick right turns clockwise
    };
}

// Predictive geofence: brakes before the horizontal boundary and caps the climb
// rate under the ceiling, accounting for the vertical transport delay.
VirtualCommand Vehicle::guard(const VirtualCommand& cmd) {
    const PlantState& s = plant();
    VirtualCommand out = cmd;

    const double max_alt = params_.get_float("drone/max_altitude");
    const double z_pred = s.position.z + std::max(0.0, s.velocity.z) * (model_->vertical_delay + 0.2);
    out.vertical_speed = std::min(out.vertical_speed, 1.5 * (max_alt - z_pred));

    if (mode_ != Mode::Piloting && mode_ != Mode::Manual) return out;

    const Lookahead ahead = look_ahead(s, *model_);
    const double radius = params_.get_float("drone/max_distance");
    const Vec3 d{ahead.position.x - fence_center_.x, ahead.position.y - fence_center_.y, 0.0};
    const double r = horizontal_norm(d);
    if (r < 1e-6) return out;
    const Vec3 u = d / r;
    const double vr = ahead.velocity.x * u.x + ahead.velocity.y * u.y;
    const double amax = kGravity * std::tan(command_limits().max_tilt);

    // fastest outward speed that can still stop before the boundary
    const double room = radius - kFenceMargin - r;
    const double allowed = room >= 0.0 ? std::sqrt(2.0 * 0.6 * amax * room) : kPosGain * room;
    // sliding along the boundary needs centripetal acceleration to stay on it
    const double vt2 = std::max(0.0, ahead.velocity.x * ahead.velocity.x + ahead.velocity.y * ahead.velocity.y - vr * vr);
    const double guard_radial = std::clamp(kBrakeGain * (allowed - vr) - vt2 / r, -amax, amax);

    const double yaw = s.attitude.yaw;
    const double fwd = kGravity * std::tan(cmd.pitch);
    const double left = -kGravity * std::tan(cmd.roll) / std::max(std::cos(cmd.pitch), 0.1);
    const Vec3 pilot{std::cos(yaw) * fwd - std::sin(yaw) * left, std::sin(yaw) * fwd + std::cos(yaw) * left, 0.0};
    const double pilot_radial = pilot.x * u.x + pilot.y * u.y;
    if (pilot_radial <= guard_radial) return out;

    // radial demand has priority, the pilot keeps what is left sideways
    Vec3 side{pilot.x - pilot_radial * u.x, pilot.y - pilot_radial * u.y, 0.0};
    const double side_max = std::sqrt(std::max(0.0, amax * amax - guard_radial * guard_radial));
    const double side_norm = horizontal_norm(side);
    if (side_norm > side_max) side = side * (side_max / side_norm);
    const Vec3 accel{guard_radial * u.x + side.x, guard_radial * u.y + side.y, 0.0};
    const VirtualCommand limited = accel_to_command(accel, out.vertical_speed, out.yaw_rate);
    out.roll = limited.roll;
    out.pitch = limited.pitch;
    return out;
}

bool Vehicle::sticks_fresh() const { return sim_time() - stick_time_ <= kStale; }

const StickInput& Vehicle::stick_state() const {
    static const StickInput none{};
    return sticks_fresh() ? stick_ : none;
}

// ---------------------------------------------------------------- directives

void Vehicle::enter_hover() {
    mode_ = Mode::Hover;
    route_.reset();
    hover_ = {};
    hover_.yaw = plant().attitude.yaw;
    if (state_ == FlightState::Flying) set_state(FlightState::Hovering);
}

void Vehicle::start_route(Route route) {
    route_ = std::move(route);
    mode_ = Mode::Route;
    if (state_ == FlightState::Hovering) set_state(FlightState::Flying);
}

void Vehicle::begin_leg() {
    const Goal& g = route_->goals[route_->cursor];
    const PlantState& s = plant();
    const double yaw = s.attitude.yaw;
    double delta = 0.0;
    bool first = g.yaw_first;
    switch (g.yaw_goal) {
    case YawGoal::Keep: break;
    case YawGoal::Delta: delta = g.yaw_value; break;
    case YawGoal::Heading: delta = wrap_pi(g.yaw_value - yaw); break;
    case YawGoal::FaceTarget: {
        const Vec3 d = g.target - s.position;
        if (horizontal_norm(d) > 0.5) delta = wrap_pi(std::atan2(d.y, d.x) - yaw);
        first = true;
        break;
    }
    }
    // the leg starts where the vehicle is, at rest
    route_->leg.emplace(s.position, yaw, g.target, delta, first, motion_limits());
    route_->leg_time = 0.0;
}

void Vehicle::finish_route() {
    Route done = std::move(*route_);
    route_.reset();
    const char* channel = "drone/state";
    switch (done.kind) {
    case RouteKind::MoveBy: emit("drone/moveby", "done", "moveby complete"); break;
    case RouteKind::MoveTo: emit("drone/moveto", "done", "moveto complete"); break;
    case RouteKind::Rth: emit("drone/rth", "done", "return home complete"); break;
    case RouteKind::Plan: emit("flightplan/start", "done", "flight plan " + done.plan_uid + " complete"); break;
    }
    (void)channel;
    if (done.end == EndAction::Land) {
        mode_ = Mode::Idle;
        set_state(FlightState::Landing);
        hover_ = {};
        return;
    }
    enter_hover();
    if (!done.goals.empty()) {
        const Vec3& t = done.goals.back().target;
        hover_.anchor = Vec3{t.x, t.y, 0.0};
        hover_.anchor_z = t.z;
    }
}

VirtualCommand Vehicle::control_step() {
    const PlantState& s = plant();
    const double now = sim_time();

    // manual sticks override everything when any axis is deflected
    if (sticks_fresh() && !stick_.axes_zero()) {
        if (mode_ == Mode::Route) {
            emit("skycontroller/command", "warning", "manual override cancelled " + std::string(directive_name()));
            route_.reset();
            paused_plan_.reset();
        }
        mode_ = Mode::Manual;
        set_state(FlightState::Flying);
        return stick_command(stick_);
    }
    if (mode_ == Mode::Manual) enter_hover();

    if (mode_ == Mode::Piloting) {
        if (!offboard_ || now - pilot_time_ > kStale || piloting_command(pilot_).is_zero()) {
            enter_hover();
        } else {
            set_state(FlightState::Flying);
            return piloting_command(pilot_);
        }
    }

    if (mode_ == Mode::Route) {
        if (!route_->leg) begin_leg();
        route_->leg_time += dt_;
        const Leg& leg = *route_->leg;
        const VirtualCommand cmd = track(leg, route_->leg_time);
        const double err = (leg.end() - s.position).norm();
        const double yaw_err = std::abs(wrap_pi(leg.end_yaw() - s.attitude.yaw));
        const bool settled = err < 0.05 && s.velocity.norm() < 0.1 && yaw_err < deg2rad(2.0);
        if (route_->leg_time >= leg.duration() && (settled || route_->leg_time > leg.duration() + 20.0)) {
            route_->leg.reset();
            if (++route_->cursor >= route_->goals.size()) {
                finish_route();
                return mode_ == Mode::Hover ? hover_command() : cmd;
            }
        }
        return cmd;
    }

    if (mode_ != Mode::Hover) enter_hover();
    return hover_command();
}

// ---------------------------------------------------------------- tick

void Vehicle::tick() {
    const double now = sim_time();

    if (state_ == FlightState::Disconnected && reboot_until_ >= 0.0 && now >= reboot_until_) {
        reboot_until_ = -1.0;
        set_state(FlightState::Connecting);
    } else if (state_ == FlightState::Connecting && ready_) {
        set_state(FlightState::Landed);
    }

    const PlantState& s = plant();
    switch (state_) {
    case FlightState::TakingOff: {
        const double target = std::min(config_.takeoff_altitude, params_.get_float("drone/max_altitude"));
        VirtualCommand cmd = hover_command();
        cmd.vertical_speed = 2.0 * (target - s.position.z);
        dynamics_.step(clamp_command(guard(cmd), command_limits()));
        if (std::abs(plant().position.z - target) < 0.05 && std::abs(plant().velocity.z) < 0.05) {
            set_state(FlightState::Hovering);
            enter_hover();
            if (plan_after_takeoff_) {
                plan_after_takeoff_ = false;
                flightplan_start(pending_plan_);
            }
        }
        break;
    }
    case FlightState::Landing: {
        VirtualCommand cmd = hover_command();
        const double max_vs = params_.get_float("drone/max_vertical_speed");
        cmd.vertical_speed = -std::min(max_vs, std::max(0.3, 0.8 * s.position.z));
        dynamics_.step(clamp_command(cmd, command_limits()));
        if (dynamics_.on_ground()) {
            dynamics_.reset(plant().position, plant().attitude.yaw);
            mode_ = Mode::Idle;
            set_state(FlightState::Landed);
            if (autorecording_ && recording_) stop_recording_internal();
            autorecording_ = false;
        }
        break;
    }
    case FlightState::Hovering:
    case FlightState::Flying: {
        const VirtualCommand cmd = control_step();
        dynamics_.step(clamp_command(guard(cmd), command_limits()));
        break;
    }
    case FlightState::Emergency: dynamics_.step_unpowered(); break;
    default: break;
    }

    if (poi_ && poi_->locked_gimbal) aim_at_poi();
    update_gimbal();
    update_camera();
    update_battery();
    update_storage();
    ++ticks_;
}

// ---------------------------------------------------------------- services

Outcome Vehicle::takeoff() {
    if (state_ != FlightState::Landed) return Outcome::failure("invalid_state", state_error(state_, "takeoff"));
    if (config_.require_arming && !armed_) return Outcome::failure("not_armed", "drone must be armed before takeoff");
    if (sim_time() < calibrating_until_) return Outcome::failure("busy", "calibration in progress");
    if (battery_ <= 0.0) return Outcome::failure("battery", "battery empty");
    const PlantState& s = plant();
    fence_center_ = {s.position.x, s.position.y, 0.0};
    takeoff_z_ = s.position.z;
    takeoff_point_ = location();
    set_state(FlightState::TakingOff);
    mode_ = Mode::Idle;
    hover_ = {};
    hover_.anchor = Vec3{s.position.x, s.position.y, 0.0};
    if (params_.get_bool("camera/autorecord") && params_.get_int("camera/mode") == 0 && !recording_) {
        if (recording_start(0).ok) autorecording_ = true;
    }
    return Outcome::success("taking off");
}

Outcome Vehicle::land() {
    switch (state_) {
    case FlightState::TakingOff:
    case FlightState::Hovering:
    case FlightState::Flying: break;
    default: return Outcome::failure("invalid_state", state_error(state_, "land"));
    }
    route_.reset();
    paused_plan_.reset();
    plan_after_takeoff_ = false;
    mode_ = Mode::Idle;
    hover_ = {};
    set_state(FlightState::Landing);
    return Outcome::success("landing");
}

Outcome Vehicle::emergency() {
    route_.reset();
    paused_plan_.reset();
    plan_after_takeoff_ = false;
    mode_ = Mode::Idle;
    set_state(FlightState::Emergency);
    return Outcome::success("motors cut");
}

Outcome Vehicle::halt() {
    switch (state_) {
    case FlightState::TakingOff:
    case FlightState::Hovering:
    case FlightState::Flying: break;
    default: return Outcome::failure("invalid_state", state_error(state_, "halt"));
    }
    paused_plan_.reset();
    plan_after_takeoff_ = false;
    pilot_ = {};
    if (state_ == FlightState::TakingOff) set_state(FlightState::Hovering);
    enter_hover();
    return Outcome::success("hovering");
}

Outcome Vehicle::arm(bool on) {
    if (airborne()) return Outcome::failure("invalid_state", state_error(state_, on ? "arm" : "disarm"));
    armed_ = on;
    return Outcome::success(on ? "armed" : "disarmed");
}

Outcome Vehicle::calibrate() {
    if (state_ != FlightState::Landed) return Outcome::failure("invalid_state", state_error(state_, "calibration"));
    calibrating_until_ = sim_time() + 2.0;
    Outcome o = Outcome::success("magnetometer calibrated");
    o.defer_s = 2.0;
    return o;
}

Outcome Vehicle::reboot() {
    const bool grounded = state_ == FlightState::Landed || state_ == FlightState::Connecting ||
                          (state_ == FlightState::Emergency && plant().position.z <= 0.0);
    if (!grounded) return Outcome::failure("invalid_state", state_error(state_, "reboot"));
    route_.reset();
    paused_plan_.reset();
    mode_ = Mode::Idle;
    if (recording_) stop_recording_internal();
    lapse_.reset();
    dynamics_.reset(plant().position, plant().attitude.yaw);
    set_state(FlightState::Disconnected);
    reboot_until_ = sim_time() + 1.0;
    armed_ = false;
    return Outcome::success("rebooting");
}

std::optional<GeoPoint> Vehicle::home() const {
    switch (params_.get_int("home/type")) {
    case 1: return takeoff_point_ ? takeoff_point_ : std::optional<GeoPoint>(location());
    case 3: return custom_home_;
    case 4: return config_.ground_station;
    default: return std::nullopt;
    }
}

Outcome Vehicle::rth() {
    if (state_ != FlightState::Hovering && state_ != FlightState::Flying) {
        return Outcome::failure("invalid_state", state_error(state_, "return home"));
    }
    const auto h = home();
    if (!h) return Outcome::failure("no_home", "home location unavailable for home/type " +
                                                   std::to_string(params_.get_int("home/type")));
    const PlantState& s = plant();
    const Vec3 home_local = geo_to_local(config_.start, *h);
    const double min_alt = params_.get_float("home/min_altitude");
    const double max_alt = params_.get_float("drone/max_altitude");
    const double z_rth = std::min(std::max(s.position.z, min_alt), max_alt);

    Route r{RouteKind::Rth, {}, 0, std::nullopt, 0.0, EndAction::Hover, {}};
    r.end = params_.get_int("home/ending_behavior") == 0 ? EndAction::Land : EndAction::Hover;
    bool clamped = false;
    const Vec3 dest = clamp_to_fence({home_local.x, home_local.y, z_rth}, clamped);
    if (clamped) emit("drone/rth", "warning", "home outside geofence, clamped to boundary");

    paused_plan_.reset();
    pilot_ = {};
    if (horizontal_norm(dest - s.position) < 0.5) {
        // already above home: apply the ending behaviour directly
        if (r.end == EndAction::Land) {
            return land();
        }
        enter_hover();
        return Outcome::success("already at home");
    }
    if (std::abs(z_rth - s.position.z) > 0.05) r.goals.push_back({{s.position.x, s.position.y, z_rth}});
    r.goals.push_back({dest});
    start_route(std::move(r));
    return Outcome::success("returning home");
}

Outcome Vehicle::navigate_home(bool start) {
    if (start) return rth();
    if (mode_ == Mode::Route && route_->kind == RouteKind::Rth) {
        enter_hover();
        return Outcome::success("return home stopped");
    }
    return Outcome::success("return home not active");
}

Outcome Vehicle::set_home(const GeoPoint& location) {
    if (!std::isfinite(location.latitude) || !std::isfinite(location.longitude) || std::abs(location.latitude) > 90 ||
        std::abs(location.longitude) > 180) {
        return Outcome::failure("domain", "invalid home location");
    }
    custom_home_ = location;
    return Outcome::success("custom home set");
}

Outcome Vehicle::set_offboard(bool on) {
    offboard_ = on;
    if (!on && mode_ == Mode::Piloting) enter_hover();
    return Outcome::success(on ? "offboard control" : "manual control");
}

Outcome Vehicle::piloted_poi(const PoiInput& poi) {
    if (state_ != FlightState::Hovering && state_ != FlightState::Flying) {
        return Outcome::failure("invalid_state", state_error(state_, "point of interest"));
    }
    poi_ = poi;
    return Outcome::success("point of interest set");
}

void Vehicle::aim_at_poi() {
    const PlantState& s = plant();
    const Vec3 target = geo_to_local(config_.start, {poi_->latitude, poi_->longitude, poi_->altitude});
    const Vec3 camera = gimbal_world_position(s.position, s.attitude, {0.05, 0.0, -0.02});
    const Vec3 d = target - camera;
    const double horiz = horizontal_norm(d);
    if (horiz < 1e-6 && std::abs(d.z) < 1e-6) return;
    gimbal_.mode = 0;
    gimbal_.frame = 2;
    gimbal_target_ = {0.0, std::atan2(-d.z, horiz), wrap_pi(std::atan2(d.y, d.x) - s.attitude.yaw)};
}

// ---------------------------------------------------------------- camera & storage

std::string Vehicle::next_media_id() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "media-%06llu", static_cast<unsigned long long>(++media_counter_));
    return buf;
}

std::uint64_t Vehicle::storage_available() const {
    const std::uint64_t used = std::accumulate(media_.begin(), media_.end(), std::uint64_t{0},
                                               [](std::uint64_t a, const MediaRecord& m) { return a + m.size; });
    return used >= config_.storage_capacity ? 0 : config_.storage_capacity - used;
}

std::optional<std::string> Vehicle::capture(const PhotoInput& req, std::string& error) {
    static const char* formats[] = {"jpeg", "dng", "jpeg+dng"};
    static const std::uint64_t sizes[] = {16 * 1024, 32 * 1024, 48 * 1024};
    const int frames = req.mode == 1 ? 3 : req.mode == 2 ? 10 : 1;
    MediaRecord rec{next_media_id(), "photo", formats[req.file_format], req.mode,
                    sizes[req.file_format] * static_cast<std::uint64_t>(frames),
                    static_cast<std::uint64_t>(std::llround(sim_time() * 1e9))};
    if (rec.size > storage_available()) {
        error = "storage full";
        --media_counter_;
        return std::nullopt;
    }
    media_.push_back(rec);
    return rec.id;
}

Outcome Vehicle::photo_take(const PhotoInput& req) {
    if (req.mode < 0 || req.mode > 4 || req.photo_format < 0 || req.photo_format > 1 || req.file_format < 0 ||
        req.file_format > 2) {
        return Outcome::failure("domain", "photo request out of range");
    }
    if (params_.get_int("camera/mode") != 1) return Outcome::failure("mode", "camera not in photo mode");
    if (recording_) return Outcome::failure("mode", "camera is recording");
    if (lapse_) return Outcome::failure("busy", "photo capture already running");
    std::string error;
    const auto id = capture(req, error);
    if (!id) return Outcome::failure("storage", error);
    if (req.mode == 3 || req.mode == 4) {
        lapse_ = Lapse{req, sim_time() + kTimeLapsePeriod, plant().position, *id};
    }
    return Outcome::success("photo taken", {{"media_id", *id}});
}

Outcome Vehicle::photo_stop() {
    if (!lapse_) return Outcome::failure("invalid_state", "no photo capture in progress");
    const std::string last = media_.empty() ? lapse_->first_id : media_.back().id;
    lapse_.reset();
    return Outcome::success("photo capture stopped", {{"media_id", last}});
}

Outcome Vehicle::recording_start(int mode) {
    if (mode < 0 || mode > 3) return Outcome::failure("domain", "recording mode out of range");
    if (params_.get_int("camera/mode") != 0) return Outcome::failure("mode", "camera not in recording mode");
    if (recording_) return Outcome::failure("busy", "already recording");
    if (storage_available() < 1024) return Outcome::failure("storage", "storage full");
    MediaRecord rec{next_media_id(), "video", "mp4", mode, 0, static_cast<std::uint64_t>(std::llround(sim_time() * 1e9))};
    media_.push_back(rec);
    recording_ = Recording{media_.size() - 1, sim_time(), 0.0};
    return Outcome::success("recording", {{"media_id", rec.id}});
}

void Vehicle::stop_recording_internal() { recording_.reset(); }

Outcome Vehicle::recording_stop() {
    if (!recording_) return Outcome::failure("invalid_state", "not recording");
    const std::string id = media_[recording_->index].id;
    stop_recording_internal();
    autorecording_ = false;
    return Outcome::success("recording stopped", {{"media_id", id}});
}

Outcome Vehicle::camera_reset() {
    zoom_velocity_ = false;
    zoom_target_ = 1.0;
    return Outcome::success("zoom reset");
}

Outcome Vehicle::storage_download(bool delete_after, std::vector<MediaRecord>& out, std::uint64_t budget) {
    if (recording_) return Outcome::failure("busy", "storage busy while recording");
    out.clear();
    std::uint64_t total = 0;
    std::size_t n = 0;
    for (; n < media_.size(); ++n) {
        if (n > 0 && total + media_[n].size > budget) break;
        total += media_[n].size;
        out.push_back(media_[n]);
    }
    const std::size_t remaining = media_.size() - n;
    if (delete_after) media_.erase(media_.begin(), media_.begin() + static_cast<std::ptrdiff_t>(n));
    return Outcome::success("downloaded " + std::to_string(n) + " media",
                            {{"count", n}, {"remaining", remaining}});
}

Outcome Vehicle::storage_format() {
    if (recording_) return Outcome::failure("busy", "storage busy while recording");
    media_.clear();
    lapse_.reset();
    return Outcome::success("storage formatted");
}

double Vehicle::hfov_deg() const {
    return rad2deg(2.0 * std::atan(std::tan(deg2rad(model_->video_hfov_deg) / 2.0) / zoom_));
}

double Vehicle::vfov_deg() const {
    const auto r = model_->stream_resolution;
    return rad2deg(2.0 * std::atan(std::tan(deg2rad(hfov_deg()) / 2.0) * r.height / r.width));
}

void Vehicle::update_camera() {
    const double max_rate = params_.get_float("camera/max_zoom_speed");
    if (sticks_fresh() && stick_.zoom != 0) {
        zoom_ += stick_.zoom / 100.0 * max_rate * dt_;
        zoom_target_ = zoom_;
        zoom_velocity_ = false;
    } else if (zoom_velocity_) {
        zoom_ += std::clamp(zoom_rate_, -max_rate, max_rate) * dt_;
    } else {
        zoom_ += std::clamp((zoom_target_ - zoom_) / kZoomTau, -max_rate, max_rate) * dt_;
    }
    zoom_ = std::clamp(zoom_, 1.0, model_->max_zoom);
}

void Vehicle::update_storage() {
    if (recording_) {
        recording_->bytes += kVideoRate * dt_;
        MediaRecord& rec = media_[recording_->index];
        const auto want = static_cast<std::uint64_t>(recording_->bytes);
        const std::uint64_t grow = want - rec.size;
        if (grow > storage_available()) {
            stop_recording_internal();
            autorecording_ = false;
            emit("camera/recording/stop", "storage", "storage full, recording stopped");
        } else {
            rec.size = want;
        }
    }
    if (lapse_) {
        bool due = false;
        if (lapse_->req.mode == 3 && sim_time() >= lapse_->next_time) {
            due = true;
            lapse_->next_time += kTimeLapsePeriod;
        }
        if (lapse_->req.mode == 4 && (plant().position - lapse_->last_position).norm() >= kGpsLapseDistance) {
            due = true;
            lapse_->last_position = plant().position;
        }
        if (due) {
            std::string error;
            if (!capture(lapse_->req, error)) {
                lapse_.reset();
                emit("camera/photo/stop", "storage", "storage full, photo capture stopped");
            }
        }
    }
}

// ---------------------------------------------------------------- gimbal

RotationMatrix Vehicle::gimbal_world() const { return gimbal_world_attitude(plant().attitude, gimbal_.relative); }

Outcome Vehicle::gimbal_reset() {
    gimbal_.mode = 0;
    gimbal_.frame = 1;
    gimbal_target_ = {};
    if (poi_) poi_->locked_gimbal = false;
    return Outcome::success("gimbal reset");
}

Outcome Vehicle::gimbal_calibrate() {
    if (airborne()) return Outcome::failure("invalid_state", state_error(state_, "gimbal calibration"));
    gimbal_.relative = {};
    gimbal_target_ = {};
    gimbal_.mode = 0;
    gimbal_.frame = 1;
    Outcome o = Outcome::success("gimbal calibrated");
    o.defer_s = 2.0;
    return o;
}

Outcome Vehicle::gimbal_command(const GimbalInput& cmd) {
    if (cmd.mode < 0 || cmd.mode > 1 || cmd.frame < 0 || cmd.frame > 2) {
        return Outcome::failure("domain", "gimbal mode/frame out of range");
    }
    if (!std::isfinite(cmd.roll) || !std::isfinite(cmd.pitch) || !std::isfinite(cmd.yaw)) {
        return Outcome::failure("domain", "gimbal command must be finite");
    }
    if (cmd.frame == 0) return Outcome::warn("warning", "gimbal frame none: command ignored");
    if (poi_ && poi_->locked_gimbal) return Outcome::warn("warning", "gimbal locked on point of interest");
    gimbal_.mode = cmd.mode;
    gimbal_.frame = cmd.frame;
    EulerAngles t{deg2rad(cmd.roll), deg2rad(cmd.pitch), deg2rad(cmd.yaw)};
    bool clamped = false;
    if (cmd.mode == 0) {
        const auto [lo, hi] = model_->gimbal_pitch_range;
        const double rl = model_->gimbal_roll_limit, yl = model_->gimbal_yaw_limit;
        const EulerAngles c{std::clamp(t.roll, -rl, rl), std::clamp(t.pitch, lo, hi), std::clamp(t.yaw, -yl, yl)};
        clamped = !(c == t);
        t = c;
    } else if (model_->gimbal_yaw_limit == 0.0) {
        t.yaw = 0.0;
    }
    gimbal_target_ = t;
    if (clamped) return Outcome::warn("clamped", "gimbal target clamped to range");
    return Outcome::success();
}

void Vehicle::update_gimbal() {
    const double max_speed = deg2rad(params_.get_float("gimbal/max_speed"));
    const auto [lo, hi] = model_->gimbal_pitch_range;
    const double rl = model_->gimbal_roll_limit, yl = model_->gimbal_yaw_limit;
    EulerAngles& a = gimbal_.relative;

    if (sticks_fresh() && stick_.camera != 0) {
        a.pitch += stick_.camera / 100.0 * max_speed * dt_;
        gimbal_stick_ = true;
    } else if (gimbal_stick_) {
        // stick released: hold the current relative attitude
        gimbal_stick_ = false;
        gimbal_.mode = 0;
        gimbal_.frame = 1;
        gimbal_target_ = a;
    } else if (gimbal_.mode == 1) {
        a.roll += std::clamp(gimbal_target_.roll, -max_speed, max_speed) * dt_;
        a.pitch += std::clamp(gimbal_target_.pitch, -max_speed, max_speed) * dt_;
        a.yaw += std::clamp(gimbal_target_.yaw, -max_speed, max_speed) * dt_;
    } else {
        EulerAngles want = gimbal_target_;
        if (gimbal_.frame == 2) {
            // absolute: hold the attitude w.r.t. the horizon, yaw w.r.t. the heading
            const EulerAngles& d = plant().attitude;
            const RotationMatrix world = euler_to_rotation({want.roll, want.pitch, d.yaw + want.yaw});
            const RotationMatrix rel = euler_to_rotation(d).transpose() * world;
            const EulerAngles e = rotation_to_euler(rel).angles;
            // the same rotation with pitch past vertical, on either side
            const EulerAngles up{wrap_pi(e.roll + kPi), kPi - e.pitch, wrap_pi(e.yaw + kPi)};
            const EulerAngles down{up.roll, -kPi - e.pitch, up.yaw};
            auto dist = [&](const EulerAngles& x) {
                return std::abs(wrap_pi(x.roll - want.roll)) + std::abs(x.pitch - want.pitch) +
                       std::abs(wrap_pi(x.yaw - want.yaw));
            };
            const EulerAngles* best = &e;
            for (const EulerAngles* c : {&up, &down}) {
                if (dist(*c) < dist(*best)) best = c;
            }
            want = {want.roll + wrap_pi(best->roll - want.roll), best->pitch, want.yaw + wrap_pi(best->yaw - want.yaw)};
        }
        const double tau = model_->gimbal_time_constant;
        auto slew = [&](double& x, double target) { x += std::clamp((target - x) / tau, -max_speed, max_speed) * dt_; };
        slew(a.roll, want.roll);
        slew(a.pitch, want.pitch);
        slew(a.yaw, want.yaw);
    }
    a.roll = std::clamp(a.roll, -rl, rl);
    a.pitch = std::clamp(a.pitch, lo, hi);
    a.yaw = std::clamp(a.yaw, -yl, yl);
}

// ---------------------------------------------------------------- battery

double Vehicle::battery_voltage() const { return model_->battery_cells * (3.3 + 0.9 * battery_ / 100.0); }

void Vehicle::update_battery() {
    if (!airborne()) return;
    const double before = battery_;
    battery_ = std::max(0.0, battery_ - 100.0 * dt_ / model_->max_flight_time);
    if (before >= 10.0 && battery_ < 10.0 && !low_battery_fired_ && params_.get_bool("home/autotrigger")) {
        low_battery_fired_ = true;
        const bool returning = mode_ == Mode::Route && route_->kind == RouteKind::Rth;
        if (!returning && (state_ == FlightState::Hovering || state_ == FlightState::Flying)) {
            const Outcome o = rth();
            emit("drone/rth", o.ok ? "warning" : o.code, o.ok ? "low battery: returning home" : o.message);
        }
    }
    if (battery_ <= 0.0 && (state_ == FlightState::Hovering || state_ == FlightState::Flying ||
                            state_ == FlightState::TakingOff)) {
        land();
        emit("drone/land", "battery", "battery empty: landing");
    }
}

// ---------------------------------------------------------------- flight plans

Outcome Vehicle::flightplan_upload(const std::string& uid, std::string_view text) {
    if (uid.empty()) return Outcome::failure("domain", "flight plan uid must not be empty");
    try {
        FlightPlan plan = parse_mission(text, uid);
        const std::size_t n = plan.waypoints.size();
        plans_[uid] = std::move(plan);
        return Outcome::success("flight plan uploaded", {{"uid", uid}, {"waypoints", n}});
    } catch (const MissionParseError& e) {
        return Outcome::failure("parse", e.what());
    }
}

Outcome Vehicle::flightplan_start(const std::string& uid) {
    auto it = plans_.find(uid);
    if (it == plans_.end()) return Outcome::failure("unknown_uid", "unknown flight plan '" + uid + "'");
    if (state_ == FlightState::Landed) {
        const Outcome t = takeoff();
        if (!t.ok) return t;
        plan_after_takeoff_ = true;
        pending_plan_ = uid;
        return Outcome::success("taking off for flight plan " + uid);
    }
    if (state_ != FlightState::Hovering && state_ != FlightState::Flying) {
        return Outcome::failure("invalid_state", state_error(state_, "flight plan start"));
    }
    if (mode_ == Mode::Route && route_->kind != RouteKind::Plan) {
        return Outcome::failure("busy", "another directive is active: " + std::string(directive_name()));
    }
    if (paused_plan_ && paused_plan_->plan_uid == uid) {
        Route r = std::move(*paused_plan_);
        paused_plan_.reset();
        start_route(std::move(r));
        return Outcome::success("flight plan resumed");
    }
    Route r{RouteKind::Plan, {}, 0, std::nullopt, 0.0, EndAction::Hover, uid};
    bool any_clamped = false;
    for (const auto& w : it->second.waypoints) {
        bool clamped = false;
        const Vec3 p = clamp_to_fence(geo_to_local(config_.start, {w.latitude, w.longitude, w.altitude}), clamped);
        any_clamped = any_clamped || clamped;
        r.goals.push_back({p, YawGoal::Heading, wrap_pi(-deg2rad(w.heading)), false});
    }
    if (any_clamped) emit("flightplan/start", "warning", "waypoints clamped to geofence");
    paused_plan_.reset();
    start_route(std::move(r));
    return Outcome::success("flight plan started");
}

Outcome Vehicle::flightplan_pause() {
    if (mode_ != Mode::Route || route_->kind != RouteKind::Plan) {
        return Outcome::failure("invalid_state", "no flight plan running");
    }
    Route r = std::move(*route_);
    r.leg.reset();
    enter_hover();
    // hold the point where the pause arrived rather than wherever braking ends
    const Vec3& p = plant().position;
    hover_.anchor = Vec3{p.x, p.y, 0.0};
    hover_.anchor_z = p.z;
    paused_plan_ = std::move(r);
    return Outcome::success("flight plan paused");
}

Outcome Vehicle::flightplan_stop() {
    const bool running = mode_ == Mode::Route && route_->kind == RouteKind::Plan;
    if (!running && !paused_plan_ && !plan_after_takeoff_) {
        return Outcome::failure("invalid_state", "no flight plan to stop");
    }
    paused_plan_.reset();
    plan_after_takeoff_ = false;
    if (running) enter_hover();
    return Outcome::success("flight plan stopped");
}

// ---------------------------------------------------------------- command topics

Outcome Vehicle::piloting(const PilotingInput& cmd) {
    if (!std::isfinite(cmd.roll) || !std::isfinite(cmd.pitch) || !std::isfinite(cmd.yaw) || !std::isfinite(cmd.gaz)) {
        return Outcome::failure("domain", "piloting command must be finite");
    }
    if (!offboard_) return Outcome::warn("warning", "piloting command ignored: offboard control disabled");
    if (state_ != FlightState::Hovering && state_ != FlightState::Flying) {
        return Outcome::warn("warning", "piloting command ignored in state " + std::string(to_string(state_)));
    }
    const bool zero = piloting_command(cmd).is_zero();
    if (mode_ == Mode::Route) {
        if (zero) return Outcome::success();
        route_.reset();
        paused_plan_.reset();
    }
    pilot_ = cmd;
    pilot_time_ = sim_time();
    if (!zero && mode_ != Mode::Manual) mode_ = Mode::Piloting;
    return Outcome::success();
}

Outcome Vehicle::sticks(const StickInput& input) {
    auto bad = [](int v) { return v < -100 || v > 100; };
    if (bad(input.x) || bad(input.y) || bad(input.z) || bad(input.yaw) || bad(input.camera) || bad(input.zoom)) {
        return Outcome::failure("domain", "stick axes must be within [-100, 100]");
    }
    const StickInput before = sticks_fresh() ? stick_ : StickInput{};
    stick_ = input;
    stick_time_ = sim_time();
    handle_buttons(input, before);
    return Outcome::success();
}

void Vehicle::handle_buttons(const StickInput& now, const StickInput& before) {
    if (now.takeoff_land && !before.takeoff_land) {
        if (state_ == FlightState::Landed) {
            takeoff();
        } else if (airborne() && state_ != FlightState::Landing) {
            land();
        }
    }
    if (now.return_home && !before.return_home) {
        if (mode_ == Mode::Route && route_->kind == RouteKind::Rth) {
            enter_hover();
        } else if (state_ == FlightState::Hovering || state_ == FlightState::Flying) {
            const Outcome o = rth();
            if (!o.ok) emit("drone/rth", o.code, o.message);
        }
    }
    if (now.reset_camera && !before.reset_camera) gimbal_reset();
    if (now.reset_zoom && !before.reset_zoom) camera_reset();
}

Outcome Vehicle::move_by(const MoveByInput& cmd) {
    if (!std::isfinite(cmd.dx) || !std::isfinite(cmd.dy) || !std::isfinite(cmd.dz) || !std::isfinite(cmd.dyaw)) {
        return Outcome::failure("domain", "moveby must be finite");
    }
    if (mode_ == Mode::Route) {
        return Outcome::warn("busy", "moveby rejected: " + std::string(directive_name()) + " active");
    }
    if (state_ != FlightState::Hovering) {
        return Outcome::warn("warning", "moveby ignored in state " + std::string(to_string(state_)));
    }
    const PlantState& s = plant();
    const double yaw = s.attitude.yaw;
    if (cmd.dx == 0.0 && cmd.dy == 0.0 && cmd.dz == 0.0 && cmd.dyaw == 0.0) {
        emit("drone/moveby", "done", "moveby complete");
        return Outcome::success();
    }
    const Vec3 world{std::cos(yaw) * cmd.dx - std::sin(yaw) * cmd.dy, std::sin(yaw) * cmd.dx + std::cos(yaw) * cmd.dy,
                     cmd.dz};
    bool clamped = false;
    const Vec3 target = clamp_to_fence(s.position + world, clamped);
    Route r{RouteKind::MoveBy, {{target, YawGoal::Delta, deg2rad(cmd.dyaw), false}}, 0, std::nullopt, 0.0,
            EndAction::Hover, {}};
    pilot_ = {};
    start_route(std::move(r));
    if (clamped) {
        emit("drone/moveby", "warning", "moveby target clamped to geofence");
        return Outcome::warn("geofence", "target clamped to geofence");
    }
    return Outcome::success();
}

Outcome Vehicle::move_to(const MoveToInput& cmd) {
    if (!std::isfinite(cmd.latitude) || !std::isfinite(cmd.longitude) || !std::isfinite(cmd.altitude) ||
        !std::isfinite(cmd.heading) || std::abs(cmd.latitude) > 90 || std::abs(cmd.longitude) > 180) {
        return Outcome::failure("domain", "moveto location invalid");
    }
    if (cmd.orientation_mode < 0 || cmd.orientation_mode > 3) {
        return Outcome::failure("domain", "orientation_mode out of range");
    }
    if (state_ != FlightState::Hovering && state_ != FlightState::Flying) {
        return Outcome::warn("warning", "moveto ignored in state " + std::string(to_string(state_)));
    }
    if (mode_ == Mode::Route) {
        return Outcome::warn("busy", "moveto rejected: " + std::string(directive_name()) + " active");
    }
    const PlantState& s = plant();
    bool clamped = false;
    const Vec3 target =
        clamp_to_fence(geo_to_local(config_.start, {cmd.latitude, cmd.longitude, cmd.altitude}), clamped);
    const double heading = wrap_pi(-deg2rad(cmd.heading));
    Goal g{target};
    switch (cmd.orientation_mode) {
    case 1: g.yaw_goal = YawGoal::FaceTarget; break;
    case 2: g = {target, YawGoal::Heading, heading, true}; break;
    case 3: g = {target, YawGoal::Heading, heading, false}; break;
    default: break;
    }
    const bool yaw_done = g.yaw_goal == YawGoal::Keep || g.yaw_goal == YawGoal::FaceTarget ||
                          std::abs(wrap_pi(heading - s.attitude.yaw)) < deg2rad(2.0);
    if ((target - s.position).norm() < 0.05 && yaw_done) {
        emit("drone/moveto", "done", "moveto complete");
        return Outcome::success();
    }
    pilot_ = {};
    start_route({RouteKind::MoveTo, {g}, 0, std::nullopt, 0.0, EndAction::Hover, {}});
    if (clamped) {
        emit("drone/moveto", "warning", "moveto target clamped to geofence");
        return Outcome::warn("geofence", "target clamped to geofence");
    }
    return Outcome::success();
}

Outcome Vehicle::camera_command(const CameraInput& cmd) {
    if (cmd.mode < 0 || cmd.mode > 1 || !std::isfinite(cmd.zoom)) {
        return Outcome::failure("domain", "camera command out of range");
    }
    if (cmd.mode == 1) {
        zoom_velocity_ = true;
        zoom_rate_ = cmd.zoom;
        return Outcome::success();
    }
    zoom_velocity_ = false;
    zoom_target_ = std::clamp(cmd.zoom, 1.0, model_->max_zoom);
    if (zoom_target_ != cmd.zoom) return Outcome::warn("clamped", "zoom level clamped to model range");
    return Outcome::success();
}

// ---------------------------------------------------------------- parameters

Outcome Vehicle::set_param(std::string_view name, const ParamValue& value) {
    if (name == "camera/mode" && recording_) return Outcome::failure("busy", "camera mode locked while recording");
    try {
        const ParamValue& stored = params_.set(name, value);
        if (name == "drone/max_pitch_roll_rate") {
            dynamics_.set_tilt_rate_limit(deg2rad(std::get<double>(stored)));
        }
        return Outcome::success();
    } catch (const ParameterError& e) {
        static const char* codes[] = {"unknown_name", "type_mismatch", "domain", "read_only"};
        return Outcome::failure(codes[static_cast<int>(e.code())], e.what());
    }
}

GeoPoint Vehicle::location() const { return local_to_geo(config_.start, plant().position); }

}  // namespace anafi
