#include "anafi/protocol/envelope.hpp"

#include <array>

#include "anafi/parameters.hpp"
#include "anafi/protocol/registry.hpp"

namespace anafi::protocol {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kKindNames{"PUB",      "SUB",       "UNSUB",     "REQ", "REP",
                                                     "PARAM_SET", "PARAM_GET", "PARAM_VAL", "ERR"};

// The payload schema for (kind, channel), or nullptr when the pair is not
// legal. `known` reports whether the channel exists at all.
const Schema* payload_schema(Kind kind, std::string_view channel, bool& known) {
    const TopicInfo* pub = find_published(channel);
    const TopicInfo* sub = find_subscribed(channel);
    const ServiceInfo* srv = find_service(channel);
    const bool param = is_parameter(channel);
    known = pub || sub || srv || param;
    switch (kind) {
    case Kind::Pub:
        if (pub) return &message_schema(pub->type);
        if (sub) return &message_schema(sub->type);
        return nullptr;
    case Kind::Sub:
    case Kind::Unsub: return pub ? &empty_schema() : nullptr;
    case Kind::Req: return srv ? &request_schema(*srv) : nullptr;
    case Kind::Rep:
        if (srv) return &response_schema(*srv);
        if (pub) return &response_schema(*find_service("drone/halt"));  // SUB/UNSUB acknowledgement
        return nullptr;
    case Kind::ParamSet: return param ? &param_set_schema() : nullptr;
    case Kind::ParamGet: return param ? &empty_schema() : nullptr;
    case Kind::ParamVal: return param ? &param_value_schema() : nullptr;
    case Kind::Err:
        known = true;  // errors may name any channel, including unknown ones
        return &error_schema();
    }
    return nullptr;
}

bool as_u64(const json& v, std::uint64_t& out) {
    if (v.is_number_unsigned()) {
        out = v.get<std::uint64_t>();
        return true;
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        out = static_cast<std::uint64_t>(v.get<std::int64_t>());
        return true;
    }
    return false;
}

// Bracket depth outside string literals; the parser recurses per level.
bool too_deep(std::string_view body) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{' || c == '[') {
            if (++depth > kMaxDepth) return true;
        } else if (c == '}' || c == ']') --depth;
    }
    return false;
}

DecodeResult failure(DecodeError error, std::string reason) {
    DecodeResult r;
    r.error = error;
    r.reason = std::move(reason);
    return r;
}

}  // namespace

std::string_view to_string(Kind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<Kind> kind_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == text) return static_cast<Kind>(i);
    }
    return std::nullopt;
}

std::string_view to_string(DecodeError error) {
    switch (error) {
    case DecodeError::None: return "none";
    case DecodeError::NeedMoreBytes: return "need_more_bytes";
    case DecodeError::FrameTooLarge: return "frame_too_large";
    case DecodeError::Malformed: return "malformed";
    case DecodeError::UnknownChannel: return "unknown_channel";
    case DecodeError::BadKind: return "bad_kind";
    case DecodeError::SchemaViolation: return "schema_violation";
    }
    return "unknown";
}

std::optional<std::string> check_envelope(const Envelope& e, DecodeError* error) {
    bool known = false;
    const Schema* schema = payload_schema(e.kind, e.channel, known);
    if (!known) {
        if (error) *error = DecodeError::UnknownChannel;
        return "unknown channel '" + e.channel + "'";
    }
    if (!schema) {
        if (error) *error = DecodeError::BadKind;
        return std::string(to_string(e.kind)) + " not allowed on '" + e.channel + "'";
    }
    if (auto why = validate(*schema, e.payload)) {
        if (error) *error = DecodeError::SchemaViolation;
        return std::string(schema->name) + " payload" + (why->front() == ':' ? "" : " ") + *why;
    }
    return std::nullopt;
}

std::string encode_body(const Envelope& e) {
    if (auto why = check_envelope(e)) throw EncodeError(*why);
    const json body{{"kind", to_string(e.kind)}, {"channel", e.channel}, {"seq", e.seq}, {"stamp", e.stamp},
                    {"payload", e.payload}};
    std::string text;
    try {
        text = body.dump();
    } catch (const json::exception& ex) {
        throw EncodeError(ex.what());
    }
    if (text.size() > kMaxBody) throw EncodeError("frame too large: " + std::to_string(text.size()) + " bytes");
    return text;
}

std::string encode(const Envelope& e) {
    const std::string body = encode_body(e);
    const auto n = static_cast<std::uint32_t>(body.size());
    std::string out;
    out.reserve(4 + body.size());
    out.push_back(static_cast<char>(n >> 24));
    out.push_back(static_cast<char>(n >> 16));
    out.push_back(static_cast<char>(n >> 8));
    out.push_back(static_cast<char>(n));
    out += body;
    return out;
}

DecodeResult decode(std::string_view bytes) {
    if (bytes.size() < 4) return failure(DecodeError::NeedMoreBytes, "incomplete length prefix");
    const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t n = (std::size_t{u[0]} << 24) | (std::size_t{u[1]} << 16) | (std::size_t{u[2]} << 8) | u[3];
    if (n > kMaxBody) {
        auto r = failure(DecodeError::FrameTooLarge, "declared body of " + std::to_string(n) + " bytes");
        r.consumed = bytes.size();  // the stream cannot be resynchronised
        return r;
    }
    if (bytes.size() - 4 < n) return failure(DecodeError::NeedMoreBytes, "truncated body");
    DecodeResult r = decode_body(bytes.substr(4, n));
    r.consumed = 4 + n;
    return r;
}

DecodeResult decode_body(std::string_view body) {
    if (body.size() > kMaxBody) return failure(DecodeError::FrameTooLarge, "body too large");
    if (too_deep(body)) return failure(DecodeError::Malformed, "nesting too deep");
    const json value = json::parse(body.begin(), body.end(), nullptr, false);
    if (value.is_discarded()) return failure(DecodeError::Malformed, "invalid JSON");
    return decode_value(value);
}

DecodeResult decode_value(const json& value) {
    if (!value.is_object()) return failure(DecodeError::Malformed, "body is not an object");
    std::uint64_t seq_hint = 0;
    std::string channel_hint;
    if (const auto s = value.find("seq"); s != value.end()) as_u64(*s, seq_hint);
    if (const auto c = value.find("channel"); c != value.end() && c->is_string()) channel_hint = c->get<std::string>();
    auto fail = [&](DecodeError error, std::string reason) {
        DecodeResult r = failure(error, std::move(reason));
        r.seq = seq_hint;
        r.channel = channel_hint;
        return r;
    };
    for (auto it = value.begin(); it != value.end(); ++it) {
        const auto& k = it.key();
        if (k != "kind" && k != "channel" && k != "seq" && k != "stamp" && k != "payload") {
            return fail(DecodeError::Malformed, "unknown envelope field '" + k + "'");
        }
    }
    const auto kind = value.find("kind");
    const auto channel = value.find("channel");
    const auto seq = value.find("seq");
    const auto stamp = value.find("stamp");
    const auto payload = value.find("payload");
    if (kind == value.end() || channel == value.end() || seq == value.end() || stamp == value.end() ||
        payload == value.end()) {
        return fail(DecodeError::Malformed, "missing envelope field");
    }
    if (!kind->is_string() || !channel->is_string()) return fail(DecodeError::Malformed, "kind and channel must be strings");
    Envelope e;
    const auto k = kind_from_string(kind->get_ref<const std::string&>());
    if (!k) return fail(DecodeError::BadKind, "unknown kind '" + kind->get<std::string>() + "'");
    e.kind = *k;
    e.channel = channel->get<std::string>();
    if (!as_u64(*seq, e.seq) || !as_u64(*stamp, e.stamp)) {
        return fail(DecodeError::Malformed, "seq and stamp must be unsigned integers");
    }
    e.payload = *payload;
    DecodeError error = DecodeError::None;
    if (auto why = check_envelope(e, &error)) return fail(error, *why);
    DecodeResult r;
    r.seq = e.seq;
    r.channel = e.channel;
    r.envelope = std::move(e);
    return r;
}

Envelope random_envelope(std::mt19937_64& rng) {
    const auto pubs = published_topics();
    const auto subs = subscribed_topics();
    const auto srvs = services();
    const auto params = parameter_specs();
    auto pick = [&](auto span) -> const auto& {
        return span[std::uniform_int_distribution<std::size_t>(0, span.size() - 1)(rng)];
    };
    Envelope e;
    e.seq = rng();
    e.stamp = rng();
    switch (std::uniform_int_distribution<int>(0, 8)(rng)) {
    case 0: {
        const auto& t = pick(pubs);
        e.kind = Kind::Pub;
        e.channel = t.name;
        e.payload = random_instance(message_schema(t.type), rng);
        break;
    }
    case 1: {
        const auto& t = pick(subs);
        e.kind = Kind::Pub;
        e.channel = t.name;
        e.payload = random_instance(message_schema(t.type), rng);
        break;
    }
    case 2:
        e.kind = std::bernoulli_distribution(0.5)(rng) ? Kind::Sub : Kind::Unsub;
        e.channel = pick(pubs).name;
        break;
    case 3: {
        const auto& s = pick(srvs);
        e.kind = Kind::Req;
        e.channel = s.name;
        e.payload = random_instance(request_schema(s), rng);
        break;
    }
    case 4: {
        const auto& s = pick(srvs);
        e.kind = Kind::Rep;
        e.channel = s.name;
        e.payload = random_instance(response_schema(s), rng);
        break;
    }
    case 5:
        e.kind = Kind::ParamSet;
        e.channel = pick(params).name;
        e.payload = random_instance(param_set_schema(), rng);
        break;
    case 6:
        e.kind = Kind::ParamGet;
        e.channel = pick(params).name;
        break;
    case 7:
        e.kind = Kind::ParamVal;
        e.channel = pick(params).name;
        e.payload = random_instance(param_value_schema(), rng);
        break;
    default:
        e.kind = Kind::Err;
        e.channel = std::bernoulli_distribution(0.3)(rng) ? std::string() : std::string(pick(srvs).name);
        e.payload = random_instance(error_schema(), rng);
        break;
    }
    return e;
}

}  // namespace anafi::protocol
