#include "anafi/simd/telemetry.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "anafi/protocol/schema.hpp"

namespace anafi::simd {

using nlohmann::json;

namespace {

struct Context {
    const Vehicle& v;
    std::uint64_t stamp;
    std::uint64_t frame;
};

json header(const Context& c, std::string_view frame_id) {
    return {{"stamp", c.stamp}, {"frame_id", frame_id}};
}

json quaternion(const Quaternion& q) { return {{"x", q.x}, {"y", q.y}, {"z", q.z}, {"w", q.w}}; }

json vector(const Vec3& p) { return {{"x", p.x}, {"y", p.y}, {"z", p.z}}; }

// Single-precision wire fields are rounded once here so receivers see the
// value a float32 register would hold.
double f32(double x) { return static_cast<double>(static_cast<float>(x)); }

json scalar(double x) { return {{"data", f32(x)}}; }

json camera_info(const Context& c) {
    const auto& r = c.v.model().stream_resolution;
    const double fx = (r.width / 2.0) / std::tan(deg2rad(c.v.hfov_deg()) / 2.0);
    const double fy = (r.height / 2.0) / std::tan(deg2rad(c.v.vfov_deg()) / 2.0);
    const double cx = r.width / 2.0, cy = r.height / 2.0;
    return {{"header", header(c, "camera")},
            {"height", r.height},
            {"width", r.width},
            {"distortion_model", "plumb_bob"},
            {"d", json::array({0.0, 0.0, 0.0, 0.0, 0.0})},
            {"k", json::array({fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0})},
            {"r", json::array({1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0})},
            {"p", json::array({fx, 0.0, cx, 0.0, 0.0, fy, cy, 0.0, 0.0, 0.0, 1.0, 0.0})}};
}

json image(const Context& c) {
    const auto& r = c.v.model().stream_resolution;
    return {{"header", header(c, "camera")},
            {"height", r.height},
            {"width", r.width},
            {"encoding", "mono8"},
            {"step", r.width},
            {"data", protocol::base64_encode(test_pattern(r.width, r.height, c.frame))}};
}

json navsat(const Context& c) {
    const GeoPoint g = c.v.location();
    return {{"header", header(c, "gps")},
            {"status", {{"status", 0}, {"service", 1}}},
            {"latitude", g.latitude},
            {"longitude", g.longitude},
            {"altitude", g.altitude},
            {"position_covariance", json::array({1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 4.0})},
            {"position_covariance_type", 2}};
}

json home(const Context& c) {
    const GeoPoint g = c.v.home().value_or(c.v.geo_anchor());
    return {{"header", header(c, "world")}, {"latitude", g.latitude}, {"longitude", g.longitude}, {"altitude", g.altitude}};
}

json sticks(const Context& c) {
    const StickInput& s = c.v.stick_state();
    return {{"header", header(c, "skycontroller")},
            {"x", s.x},
            {"y", s.y},
            {"z", s.z},
            {"yaw", s.yaw},
            {"camera", s.camera},
            {"zoom", s.zoom},
            {"return_home", s.return_home},
            {"takeoff_land", s.takeoff_land},
            {"reset_camera", s.reset_camera},
            {"reset_zoom", s.reset_zoom}};
}

using Builder = std::function<json(const Context&)>;

const std::map<std::string_view, Builder>& builders() {
    static const std::map<std::string_view, Builder> table{
        {"battery/health", [](const Context& c) { return json{{"data", c.v.battery_health()}}; }},
        {"battery/percentage",
         [](const Context& c) { return json{{"data", static_cast<int>(std::ceil(c.v.battery_percent()))}}; }},
        {"battery/voltage", [](const Context& c) { return scalar(c.v.battery_voltage()); }},
        {"camera/awb_b_gain", [](const Context&) { return scalar(1.75); }},
        {"camera/awb_r_gain", [](const Context&) { return scalar(1.5); }},
        {"camera/camera_info", camera_info},
        {"camera/exposure_time", [](const Context&) { return scalar(1.0 / 120.0); }},
        {"camera/hfov", [](const Context& c) { return scalar(c.v.hfov_deg()); }},
        {"camera/image", image},
        {"camera/iso_gain", [](const Context&) { return json{{"data", 100}}; }},
        {"camera/vfov", [](const Context& c) { return scalar(c.v.vfov_deg()); }},
        {"camera/zoom", [](const Context& c) { return scalar(c.v.zoom()); }},
        {"drone/altitude", [](const Context& c) { return scalar(std::max(0.0, c.v.plant().position.z)); }},
        {"drone/altitude_above_to", [](const Context& c) { return scalar(c.v.altitude_above_takeoff()); }},
        {"drone/attitude",
         [](const Context& c) {
             return json{{"header", header(c, "world")}, {"quaternion", quaternion(euler_to_quaternion(c.v.plant().attitude))}};
         }},
        {"drone/gps/fix", [](const Context&) { return json{{"data", true}}; }},
        {"drone/gps/location", navsat},
        {"drone/gps/satellites", [](const Context&) { return json{{"data", 12}}; }},
        {"drone/rpy",
         [](const Context& c) {
             const auto& a = c.v.plant().attitude;
             return json{{"header", header(c, "world")},
                         {"vector", vector({f32(rad2deg(a.roll)), f32(rad2deg(a.pitch)), f32(rad2deg(a.yaw))})}};
         }},
        {"drone/speed",
         [](const Context& c) {
             const auto& s = c.v.plant();
             const Vec3 b = world_to_body(s.attitude, s.velocity);
             return json{{"header", header(c, "body")}, {"vector", vector({f32(b.x), f32(b.y), f32(b.z)})}};
         }},
        {"drone/state", [](const Context& c) { return json{{"data", to_string(c.v.state())}}; }},
        {"gimbal/attitude/absolute",
         [](const Context& c) {
             const auto e = rotation_to_euler(c.v.gimbal_world()).angles;
             return json{{"header", header(c, "world")}, {"quaternion", quaternion(euler_to_quaternion(e))}};
         }},
        {"home/location", home},
        {"link/quality", [](const Context& c) { return json{{"data", c.v.link_quality()}}; }},
        {"skycontroller/attitude",
         [](const Context& c) { return json{{"header", header(c, "world")}, {"quaternion", quaternion({})}}; }},
        {"skycontroller/command", sticks},
        {"skycontroller/rpy",
         [](const Context& c) { return json{{"header", header(c, "world")}, {"vector", vector({})}}; }},
        {"storage/available", [](const Context& c) { return json{{"data", c.v.storage_available()}}; }},
        {"time", [](const Context& c) { return json{{"data", c.stamp}}; }},
    };
    return table;
}

}  // namespace

json telemetry_payload(const Vehicle& v, std::string_view topic, std::uint64_t stamp_ns, std::uint64_t frame) {
    const auto it = builders().find(topic);
    if (it == builders().end()) throw std::out_of_range("no telemetry for " + std::string(topic));
    return it->second(Context{v, stamp_ns, frame});
}

std::string test_pattern(int width, int height, std::uint64_t frame) {
    std::string px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), '\0');
    for (int y = 0; y < height; ++y) {
        char* row = px.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width);
        for (int x = 0; x < width; ++x) row[x] = static_cast<char>((x + y + frame) & 0xff);
    }
    for (int i = 0; i < 8 && i < width * height; ++i) px[i] = static_cast<char>(frame >> (56 - 8 * i));
    return px;
}

}  // namespace anafi::simd
