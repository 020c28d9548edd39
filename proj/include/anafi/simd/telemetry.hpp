// Wire payloads for the published topics, built from the vehicle after a tick.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "anafi/vehicle.hpp"

namespace anafi::simd {

/// `frame` is the topic's publication index (used by the image pattern).
nlohmann::json telemetry_payload(const Vehicle& v, std::string_view topic, std::uint64_t stamp_ns,
                                 std::uint64_t frame);

/// Synthetic mono8 test pattern: diagonal gradient with the frame counter
/// written big-endian into the first eight pixels.
std::string test_pattern(int width, int height, std::uint64_t frame);

}  // namespace anafi::simd
