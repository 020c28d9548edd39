// Plaintext waypoint missions: a "QGC WPL 110" header followed by one
// tab-separated line per waypoint (index, latitude, longitude, altitude,
// heading).
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anafi {

struct Waypoint {
    double latitude;   // deg
    double longitude;  // deg
    double altitude;   // m
    double heading;    // deg from north, clockwise

    bool operator==(const Waypoint&) const = default;
};

struct FlightPlan {
    std::string uid;
    std::vector<Waypoint> waypoints;

    bool operator==(const FlightPlan&) const = default;
};

class MissionParseError : public std::runtime_error {
public:
    MissionParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

inline constexpr std::string_view kMissionHeader = "QGC WPL 110";

/// Indices must start at 0 and increase by one. Throws MissionParseError.
FlightPlan parse_mission(std::string_view text, std::string uid);
std::string format_mission(const FlightPlan& plan);

}  // namespace anafi
