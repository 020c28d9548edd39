#include "anafi/mission.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace anafi {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

template <typename T>
T number(std::string_view field, int line, const char* what) {
    T v{};
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw MissionParseError(line, std::string("bad ") + what + " '" + std::string(field) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) throw MissionParseError(line, std::string(what) + " must be finite");
    }
    return v;
}

}  // namespace

FlightPlan parse_mission(std::string_view text, std::string uid) {
    FlightPlan plan{std::move(uid), {}};
    auto lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view l = lines[i];
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        const int n = static_cast<int>(i) + 1;
        if (i == 0) {
            if (l != kMissionHeader) throw MissionParseError(1, "expected header 'QGC WPL 110'");
            continue;
        }
        if (l.empty()) throw MissionParseError(n, "empty line");
        const auto f = split(l, '\t');
        if (f.size() != 5) {
            throw MissionParseError(n, "expected 5 tab-separated fields, got " + std::to_string(f.size()));
        }
        const auto index = number<long>(f[0], n, "index");
        if (index != static_cast<long>(plan.waypoints.size())) {
            throw MissionParseError(n, "index " + std::to_string(index) + " out of sequence");
        }
        Waypoint w{number<double>(f[1], n, "latitude"), number<double>(f[2], n, "longitude"),
                   number<double>(f[3], n, "altitude"), number<double>(f[4], n, "heading")};
        if (std::abs(w.latitude) > 90.0) throw MissionParseError(n, "latitude out of range");
        if (std::abs(w.longitude) > 180.0) throw MissionParseError(n, "longitude out of range");
        plan.waypoints.push_back(w);
    }
    if (lines.empty()) throw MissionParseError(1, "empty file");
    if (plan.waypoints.empty()) throw MissionParseError(static_cast<int>(lines.size()), "no waypoints");
    return plan;
}

std::string format_mission(const FlightPlan& plan) {
    std::string out{kMissionHeader};
    out += '\n';
    char buf[160];
    for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
        const auto& w = plan.waypoints[i];
        std::snprintf(buf, sizeof buf, "%zu\t%.9f\t%.9f\t%.3f\t%.3f\n", i, w.latitude, w.longitude, w.altitude,
                      w.heading);
        out += buf;
    }
    return out;
}

}  // namespace anafi
