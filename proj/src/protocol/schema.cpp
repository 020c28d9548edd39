#include "anafi/protocol/schema.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <limits>

namespace anafi::protocol {

using nlohmann::json;

const Field* Schema::find(std::string_view field) const {
    for (const auto& f : fields) {
        if (f.name == field) return &f;
    }
    return nullptr;
}

namespace {

bool finite_number(const json& v) {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && std::isfinite(v.get<double>());
}

std::optional<std::int64_t> as_integer(const json& v) {
    if (v.is_number_unsigned()) {
        const auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) return std::nullopt;
        return static_cast<std::int64_t>(u);
    }
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
    }
    return std::nullopt;
}

std::optional<std::string> check(const Field& f, const json& v, const std::string& path);

std::optional<std::string> check_object(const Schema& s, const json& value, const std::string& path) {
    if (!value.is_object()) return path + ": expected object";
    for (auto it = value.begin(); it != value.end(); ++it) {
        if (!s.find(it.key())) return path + ": unknown field '" + it.key() + "'";
    }
    for (const auto& f : s.fields) {
        const auto it = value.find(f.name);
        const std::string sub = path.empty() ? std::string(f.name) : path + "." + std::string(f.name);
        if (it == value.end()) {
            if (f.required) return sub + ": missing";
            continue;
        }
        if (auto err = check(f, *it, sub)) return err;
    }
    return std::nullopt;
}

std::optional<std::string> check(const Field& f, const json& v, const std::string& path) {
    switch (f.type) {
    case FieldType::Bool:
        if (!v.is_boolean()) return path + ": expected bool";
        return std::nullopt;
    case FieldType::Int: {
        const auto i = as_integer(v);
        if (!i) return path + ": expected integer";
        if (!f.allowed.empty()) {
            for (auto a : f.allowed) {
                if (a == *i) return std::nullopt;
            }
            return path + ": value " + std::to_string(*i) + " not in allowed set";
        }
        if (*i < f.min || *i > f.max) {
            return path + ": value " + std::to_string(*i) + " outside [" + std::to_string(f.min) + ", " +
                   std::to_string(f.max) + "]";
        }
        return std::nullopt;
    }
    case FieldType::UInt64:
        if (v.is_number_unsigned()) return std::nullopt;
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return std::nullopt;
        return path + ": expected non-negative integer";
    case FieldType::Float:
        if (!finite_number(v)) return path + ": expected finite number";
        return std::nullopt;
    case FieldType::String:
        if (!v.is_string()) return path + ": expected string";
        if (!f.choices.empty()) {
            const auto& s = v.get_ref<const std::string&>();
            for (auto c : f.choices) {
                if (c == s) return std::nullopt;
            }
            return path + ": '" + s + "' not in allowed set";
        }
        return std::nullopt;
    case FieldType::Base64:
        if (!v.is_string() || !valid_base64(v.get_ref<const std::string&>())) return path + ": expected base64";
        return std::nullopt;
    case FieldType::Object: return check_object(*f.nested, v, path);
    case FieldType::FloatArray:
        if (!v.is_array() || v.size() != f.length) {
            return path + ": expected array of " + std::to_string(f.length) + " numbers";
        }
        for (const auto& x : v) {
            if (!finite_number(x)) return path + ": expected finite number";
        }
        return std::nullopt;
    case FieldType::ObjectList:
        if (!v.is_array()) return path + ": expected array";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (auto err = check_object(*f.nested, v[i], path + "[" + std::to_string(i) + "]")) return err;
        }
        return std::nullopt;
    case FieldType::Scalar:
        if (v.is_boolean() || v.is_string() || finite_number(v)) return std::nullopt;
        return path + ": expected bool, number or string";
    }
    return path + ": unsupported field";
}

std::string random_text(std::mt19937_64& rng) {
    static const char* pieces[] = {"a", "Z", "0", " ", "/", "\"", "\\", "\n", "\t", "\x01", "é", "д", "漢", "🚁", "_"};
    std::uniform_int_distribution<int> len(0, 12), pick(0, std::size(pieces) - 1);
    std::string out;
    for (int i = len(rng); i > 0; --i) out += pieces[pick(rng)];
    return out;
}

double random_double(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> style(0, 9);
    switch (style(rng)) {
    case 0: return 0.0;
    case 1: return std::uniform_int_distribution<int>(-1000, 1000)(rng);
    case 2: return std::ldexp(std::uniform_real_distribution<double>(-1, 1)(rng), std::uniform_int_distribution<int>(-1000, 1000)(rng));
    default: return std::uniform_real_distribution<double>(-1e4, 1e4)(rng);
    }
}

json random_field(const Field& f, std::mt19937_64& rng) {
    switch (f.type) {
    case FieldType::Bool: return std::bernoulli_distribution(0.5)(rng);
    case FieldType::Int:
        if (!f.allowed.empty()) {
            return f.allowed[std::uniform_int_distribution<std::size_t>(0, f.allowed.size() - 1)(rng)];
        }
        return std::uniform_int_distribution<std::int64_t>(f.min, f.max)(rng);
    case FieldType::UInt64: return static_cast<std::uint64_t>(rng());
    case FieldType::Float: return random_double(rng);
    case FieldType::String:
        if (!f.choices.empty()) {
            return std::string(f.choices[std::uniform_int_distribution<std::size_t>(0, f.choices.size() - 1)(rng)]);
        }
        return random_text(rng);
    case FieldType::Base64: {
        std::string raw(std::uniform_int_distribution<int>(0, 48)(rng), '\0');
        for (auto& c : raw) c = static_cast<char>(rng());
        return base64_encode(raw);
    }
    case FieldType::Object: return random_instance(*f.nested, rng);
    case FieldType::FloatArray: {
        json a = json::array();
        for (std::size_t i = 0; i < f.length; ++i) a.push_back(random_double(rng));
        return a;
    }
    case FieldType::ObjectList: {
        json a = json::array();
        for (int i = std::uniform_int_distribution<int>(0, 3)(rng); i > 0; --i) a.push_back(random_instance(*f.nested, rng));
        return a;
    }
    case FieldType::Scalar:
        switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: return std::bernoulli_distribution(0.5)(rng);
        case 1: return std::uniform_int_distribution<std::int64_t>(-1000, 1000)(rng);
        case 2: return random_double(rng);
        default: return random_text(rng);
        }
    }
    return nullptr;
}

}  // namespace

std::optional<std::string> validate(const Schema& schema, const json& value) {
    return check_object(schema, value, "");
}

json random_instance(const Schema& schema, std::mt19937_64& rng) {
    json out = json::object();
    for (const auto& f : schema.fields) {
        if (!f.required && std::bernoulli_distribution(0.5)(rng)) continue;
        out[std::string(f.name)] = random_field(f, rng);
    }
    return out;
}

bool valid_base64(std::string_view s) {
    if (s.size() % 4 != 0) return false;
    std::size_t pad = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '=') {
            if (i + 2 < s.size()) return false;
            ++pad;
            continue;
        }
        if (pad) return false;
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '/';
        if (!ok) return false;
    }
    return pad <= 2;
}

std::string base64_encode(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
    if (!valid_base64(text)) return std::nullopt;
    std::string out(3 * text.size() / 4, '\0');
    const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0) return std::nullopt;
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=') pad = text[text.size() - 2] == '=' ? 2 : 1;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

}  // namespace anafi::protocol
