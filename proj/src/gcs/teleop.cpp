#include "anafi/gcs/teleop.hpp"

#include <algorithm>

namespace anafi::gcs {

std::vector<Key> decode_keys(std::string& buffer) {
    std::vector<Key> keys;
    std::size_t i = 0;
    while (i < buffer.size()) {
        const char c = buffer[i];
        if (c == '\x1b') {
            if (i + 1 >= buffer.size()) break;
            if (buffer[i + 1] != '[' && buffer[i + 1] != 'O') {
                ++i;  // lone escape
                continue;
            }
            if (i + 2 >= buffer.size()) break;
            switch (buffer[i + 2]) {
            case 'A': keys.push_back(Key::Up); break;
            case 'B': keys.push_back(Key::Down); break;
            case 'C': keys.push_back(Key::Right); break;
            case 'D': keys.push_back(Key::Left); break;
            default: break;
            }
            i += 3;
            continue;
        }
        switch (c) {
        case 'w': case 'W': keys.push_back(Key::W); break;
        case 'a': case 'A': keys.push_back(Key::A); break;
        case 's': case 'S': keys.push_back(Key::S); break;
        case 'd': case 'D': keys.push_back(Key::D); break;
        case 'g': case 'G': keys.push_back(Key::G); break;
        case 'h': case 'H': keys.push_back(Key::H); break;
        case 't': case 'T': keys.push_back(Key::T); break;
        case 'l': case 'L': keys.push_back(Key::L); break;
        case ' ': keys.push_back(Key::Space); break;
        case 'q': case 'Q': case '\x03': keys.push_back(Key::Quit); break;
        default: break;
        }
        ++i;
    }
    buffer.erase(0, i);
    return keys;
}

TeleopMapper::TeleopMapper(int magnitude, Clock::duration hold)
    : magnitude_(std::clamp(magnitude, 0, 100)), hold_(hold) {}

TeleopMapper::Action TeleopMapper::press(Key key, Clock::time_point now) {
    switch (key) {
    case Key::T: return Action::Takeoff;
    case Key::L: return Action::Land;
    case Key::Space:
        release_all();
        return Action::Halt;
    case Key::Quit:
        release_all();
        return Action::Quit;
    default: break;
    }
    last_press_[key] = now;
    return Action::None;
}

void TeleopMapper::release(Key key) { last_press_.erase(key); }

void TeleopMapper::release_all() { last_press_.clear(); }

bool TeleopMapper::held(Key key, Clock::time_point now) const {
    const auto it = last_press_.find(key);
    return it != last_press_.end() && now - it->second < hold_;
}

int TeleopMapper::axis(Key plus, Key minus, Clock::time_point now) const {
    return (held(plus, now) ? magnitude_ : 0) - (held(minus, now) ? magnitude_ : 0);
}

nlohmann::json TeleopMapper::command(Clock::time_point now) const {
    return {{"x", axis(Key::W, Key::S, now)},
            {"y", axis(Key::D, Key::A, now)},
            {"z", axis(Key::Up, Key::Down, now)},
            {"yaw", axis(Key::Right, Key::Left, now)},
            {"camera", axis(Key::G, Key::H, now)},
            {"zoom", 0},
            {"return_home", false},
            {"takeoff_land", false},
            {"reset_camera", false},
            {"reset_zoom", false}};
}

bool TeleopMapper::idle(Clock::time_point now) const {
    return std::none_of(last_press_.begin(), last_press_.end(),
                        [&](const auto& kv) { return now - kv.second < hold_; });
}

}  // namespace anafi::gcs
