// Drone parameter registry (names, types, defaults, ranges) and the store that
// keeps every value inside its declared domain.
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace anafi {

enum class ParamType { Bool, Int, Float, String };

std::string_view to_string(ParamType type);

using ParamValue = std::variant<bool, std::int64_t, double, std::string>;

struct ParamSpec {
    std::string_view name;
    ParamType type;
    ParamValue default_value;
    // Float: closed range [min, max]. Int: allowed set. String: allowed set (empty = any).
    double min{0.0};
    double max{0.0};
    std::vector<std::int64_t> allowed_ints;
    std::vector<std::string_view> allowed_strings;
    bool read_only{false};
    std::string_view description;
};

/// Every parameter, sorted by name.
std::span<const ParamSpec> parameter_specs();
const ParamSpec* find_param_spec(std::string_view name);

class ParameterError : public std::runtime_error {
public:
    enum class Code { UnknownName, TypeMismatch, OutOfDomain, ReadOnly };
    ParameterError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

class ParameterStore {
public:
    /// Loads every default. `model_name` fills drone/model.
    explicit ParameterStore(std::string_view model_name = "unknown");

    /// Floats are clamped into range; ints must belong to the allowed set;
    /// returns the stored value. Throws ParameterError.
    const ParamValue& set(std::string_view name, const ParamValue& value);
    const ParamValue& get(std::string_view name) const;

    bool get_bool(std::string_view name) const;
    std::int64_t get_int(std::string_view name) const;
    double get_float(std::string_view name) const;
    const std::string& get_string(std::string_view name) const;

    const std::map<std::string, ParamValue, std::less<>>& values() const { return values_; }

private:
    std::map<std::string, ParamValue, std::less<>> values_;
};

}  // namespace anafi
