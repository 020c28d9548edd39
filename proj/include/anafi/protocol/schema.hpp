// Declarative JSON message schemas: strict validation (no unknown keys, no
// missing required fields, enum sets enforced) and random valid instances for
// round-trip testing.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace anafi::protocol {

enum class FieldType {
    Bool,
    Int,         // integer within [min, max], or within `allowed` when given
    UInt64,      // non-negative integer up to 2^64 - 1
    Float,       // any finite number
    String,      // any string, or one of `choices` when given
    Base64,      // padded standard alphabet
    Object,      // nested schema
    FloatArray,  // exactly `length` finite numbers
    ObjectList,  // any number of nested objects
    Scalar,      // bool, number or string
};

struct Schema;

struct Field {
    std::string_view name;
    FieldType type;
    bool required{true};
    std::int64_t min{0};
    std::int64_t max{0};
    std::vector<std::int64_t> allowed{};
    std::vector<std::string_view> choices{};
    const Schema* nested{nullptr};
    std::size_t length{0};
};

struct Schema {
    std::string_view name;
    std::vector<Field> fields;

    const Field* find(std::string_view field) const;
};

/// nullopt when `value` conforms, otherwise a reason naming the offending path.
std::optional<std::string> validate(const Schema& schema, const nlohmann::json& value);

nlohmann::json random_instance(const Schema& schema, std::mt19937_64& rng);

bool valid_base64(std::string_view text);
std::string base64_encode(std::string_view bytes);
std::optional<std::string> base64_decode(std::string_view text);

}  // namespace anafi::protocol
