// Envelope framing: 4-byte big-endian body length followed by a JSON object
// {kind, channel, seq, stamp, payload}. Keys are emitted sorted, so encoding a
// decoded envelope reproduces the original bytes.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace anafi::protocol {

enum class Kind { Pub, Sub, Unsub, Req, Rep, ParamSet, ParamGet, ParamVal, Err };

std::string_view to_string(Kind kind);
std::optional<Kind> kind_from_string(std::string_view text);

inline constexpr std::size_t kMaxBody = 16u << 20;
inline constexpr int kMaxDepth = 64;

struct Envelope {
    Kind kind{Kind::Pub};
    std::string channel;
    std::uint64_t seq{0};
    std::uint64_t stamp{0};  // ns since the Unix epoch; 0 on a REQ means "now"
    nlohmann::json payload = nlohmann::json::object();

    bool operator==(const Envelope&) const = default;
};

enum class DecodeError { None, NeedMoreBytes, FrameTooLarge, Malformed, UnknownChannel, BadKind, SchemaViolation };

std::string_view to_string(DecodeError error);

struct DecodeResult {
    std::optional<Envelope> envelope;
    DecodeError error{DecodeError::None};
    std::string reason;
    std::size_t consumed{0};  // bytes to drop from the stream; 0 when more are needed
    std::uint64_t seq{0};     // best effort, so errors can name the offending request
    std::string channel;

    bool ok() const { return envelope.has_value(); }
};

struct EncodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Why `e` is not a valid envelope, or nullopt.
std::optional<std::string> check_envelope(const Envelope& e, DecodeError* error = nullptr);

/// Serialised body without the length prefix. Throws EncodeError.
std::string encode_body(const Envelope& e);
std::string encode(const Envelope& e);

/// Decodes the first frame in `bytes`. A complete frame that fails validation
/// still reports `consumed` so a stream reader can skip it.
DecodeResult decode(std::string_view bytes);
DecodeResult decode_body(std::string_view body);
DecodeResult decode_value(const nlohmann::json& value);

/// A random envelope that passes check_envelope.
Envelope random_envelope(std::mt19937_64& rng);

inline Envelope make_error(std::string channel, std::uint64_t seq, std::uint64_t stamp, std::string code,
                           std::string message) {
    return {Kind::Err, std::move(channel), seq, stamp,
            nlohmann::json{{"code", std::move(code)}, {"message", std::move(message)}}};
}

}  // namespace anafi::protocol
