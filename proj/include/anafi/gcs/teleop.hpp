// Keyboard teleoperation: key state to SkycontrollerCommand axes.
//
// WASD pitch/roll, arrows gaz/yaw, g/h gimbal up/down, t/l takeoff/land,
// space halt, q quit. Terminals only report presses (and auto-repeat), so a
// key counts as held until `hold` passes without a new press; a real release
// clears it at once.
#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace anafi::gcs {

enum class Key { W, A, S, D, Up, Down, Left, Right, G, H, T, L, Space, Quit };

/// Pulls complete key presses (including arrow escape sequences) off the
/// front of `buffer`; an incomplete escape sequence is left in place.
std::vector<Key> decode_keys(std::string& buffer);

class TeleopMapper {
public:
    using Clock = std::chrono::steady_clock;
    enum class Action { None, Takeoff, Land, Halt, Quit };

    static constexpr auto kPublishPeriod = std::chrono::milliseconds(50);  // 20 Hz

    explicit TeleopMapper(int magnitude = 50, Clock::duration hold = std::chrono::milliseconds(600));

    Action press(Key key, Clock::time_point now);
    void release(Key key);
    void release_all();

    /// SkycontrollerCommand payload for the keys held at `now`.
    nlohmann::json command(Clock::time_point now) const;
    bool idle(Clock::time_point now) const;

private:
    bool held(Key key, Clock::time_point now) const;
    int axis(Key plus, Key minus, Clock::time_point now) const;

    int magnitude_;
    Clock::duration hold_;
    std::map<Key, Clock::time_point> last_press_;
};

}  // namespace anafi::gcs
