// Translation between wire payloads (degrees, published field names) and the
// vehicle's request methods.
#pragma once

#include <string_view>

#include "json.hpp"

#include "anafi/parameters.hpp"
#include "anafi/vehicle.hpp"

namespace anafi::simd {

/// Bytes of media content returned by one storage/download reply.
inline constexpr std::uint64_t kDownloadBudget = 8u << 20;

/// Applies a command-topic payload (already schema-checked).
Outcome apply_command(Vehicle& v, std::string_view topic, const nlohmann::json& payload);

/// Calls a drone service. On success the outcome's extras hold the reply
/// fields beyond success/message/code.
Outcome call_service(Vehicle& v, std::string_view service, const nlohmann::json& request);

/// REP payload {success, message, code?, ...extras}.
nlohmann::json reply_payload(const Outcome& o);

/// Wire scalar to a parameter value; nullopt for non-scalars.
std::optional<ParamValue> param_from_json(const nlohmann::json& value);
nlohmann::json param_to_json(const ParamValue& value);

}  // namespace anafi::simd
