#include "anafi/simd/node.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "anafi/protocol/registry.hpp"
#include "anafi/simd/dispatch.hpp"
#include "anafi/simd/telemetry.hpp"

namespace anafi::simd {

using nlohmann::json;
using protocol::Envelope;
using protocol::Kind;

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t millihertz(double hz) { return std::llround(hz * 1000.0); }

}  // namespace

Node::Node(NodeConfig config)
    : config_(std::move(config)),
      vehicle_(config_.vehicle),
      tick_ns_(static_cast<std::uint64_t>(std::llround(1e9 / config_.vehicle.tick_rate))),
      tick_rate_mhz_(millihertz(config_.vehicle.tick_rate)) {
    for (const auto& t : protocol::published_topics()) topics_.push_back({t.name, millihertz(t.rate_hz), {}});
}

Node::~Node() { stop(); }

void Node::start() {
    if (running_.exchange(true)) return;
    thread_ = std::thread([this] { loop(); });
}

void Node::stop() {
    if (!running_.exchange(false)) return;
    inbox_cv_.notify_all();
    if (thread_.joinable()) thread_.join();
}

void Node::post(Envelope request, std::shared_ptr<Sink> from) {
    {
        std::lock_guard lock(inbox_mutex_);
        inbox_.push_back({Control::Request, std::move(request), std::move(from)});
        inbox_flag_ = true;
    }
    inbox_cv_.notify_one();
}

void Node::attach(std::shared_ptr<Sink> sink) {
    std::lock_guard lock(inbox_mutex_);
    inbox_.push_back({Control::Attach, {}, std::move(sink)});
    inbox_flag_ = true;
}

void Node::detach(std::shared_ptr<Sink> sink) {
    std::lock_guard lock(inbox_mutex_);
    inbox_.push_back({Control::Detach, {}, std::move(sink)});
    inbox_flag_ = true;
}

void Node::mark_ready() {
    std::lock_guard lock(inbox_mutex_);
    inbox_.push_back({Control::Ready, {}, nullptr});
    inbox_flag_ = true;
}

void Node::run_ticks(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
        drain_inbox();
        apply_due();
        step();
    }
}

void Node::loop() {
    const double factor = config_.realtime_factor <= 0.0 ? kMaxAcceleration
                                                          : std::min(config_.realtime_factor, kMaxAcceleration);
    const auto period = std::chrono::duration<double>(1.0 / (config_.vehicle.tick_rate * factor));
    auto base_wall = Clock::now();
    std::uint64_t base_tick = ticks_;
    while (running_) {
        drain_inbox();
        apply_due();
        step();
        const auto target =
            base_wall + std::chrono::duration_cast<Clock::duration>(period * static_cast<double>(ticks_ - base_tick));
        const auto now = Clock::now();
        if (now - target > std::chrono::milliseconds(250)) {
            // too far behind to catch up without a burst; restart the pacing
            base_wall = now;
            base_tick = ticks_;
        } else if (target - now > std::chrono::milliseconds(1)) {
            std::unique_lock lock(inbox_mutex_);
            inbox_cv_.wait_until(lock, target, [&] { return !running_; });
        }
    }
}

void Node::drain_inbox() {
    if (!inbox_flag_.load(std::memory_order_acquire)) return;
    std::vector<Inbound> batch;
    {
        std::lock_guard lock(inbox_mutex_);
        batch.swap(inbox_);
        inbox_flag_ = false;
    }
    const std::uint64_t now = ticks_;
    for (auto& in : batch) {
        switch (in.control) {
        case Control::Attach: sinks_.push_back(std::move(in.from)); continue;
        case Control::Detach: forget(in.from.get()); continue;
        case Control::Ready: vehicle_.mark_ready(); continue;
        case Control::Request: break;
        }
        Envelope& e = in.envelope;
        std::uint64_t tick = now;
        bool late = false;
        const bool timed = e.stamp != 0 && (e.kind == Kind::Req || e.kind == Kind::Pub || e.kind == Kind::ParamSet);
        if (timed) {
            if (e.stamp < config_.epoch_ns) {
                late = true;
            } else {
                const std::uint64_t rel = e.stamp - config_.epoch_ns;
                const std::uint64_t at = rel / tick_ns_ + (rel % tick_ns_ != 0);
                if (at < now) late = true;
                else tick = at;
            }
        }
        if (pending_.size() >= kMaxPending) {
            notice(e.channel, e.seq, "busy", "too many pending requests", in.from);
            continue;
        }
        pending_.push({tick, arrivals_++, late, std::move(e), std::move(in.from)});
    }
}

void Node::apply_due() {
    while (!pending_.empty() && pending_.top().tick <= ticks_) {
        Timed t = pending_.top();
        pending_.pop();
        apply(t);
    }
}

void Node::apply(Timed& t) {
    const Envelope& e = t.envelope;
    switch (e.kind) {
    case Kind::Req: handle_request(t); return;
    case Kind::ParamSet:
    case Kind::ParamGet: handle_param(t); return;
    case Kind::Sub:
    case Kind::Unsub: handle_subscription(t); return;
    case Kind::Pub: {
        const auto* topic = protocol::find_subscribed(e.channel);
        const auto* published = protocol::find_published(e.channel);
        if (!topic && !(published && published->client_publishable)) {
            notice(e.channel, e.seq, "bad_kind", "topic is published by the drone", t.from);
            return;
        }
        if (t.late) notice(e.channel, e.seq, "late", "stamp already passed; applied now", t.from);
        const Outcome o = apply_command(vehicle_, e.channel, e.payload);
        if (!o.ok || o.warning) notice(e.channel, e.seq, o.code, o.message, t.from);
        return;
    }
    default:
        notice(e.channel, e.seq, "bad_kind", std::string(protocol::to_string(e.kind)) + " is not accepted from clients",
               t.from);
    }
}

void Node::handle_request(const Timed& t) {
    const Envelope& e = t.envelope;
    json payload;
    double defer = 0.0;
    if (e.channel == "connection/hello") {
        payload = hello();
    } else if (e.channel == "fleet/info") {
        payload = config_.fleet_info ? config_.fleet_info() : json{{"drones", json::array()}};
        payload["success"] = true;
        payload["message"] = "";
    } else {
        const Outcome o = call_service(vehicle_, e.channel, e.payload);
        payload = reply_payload(o);
        defer = o.defer_s;
    }
    if (t.late && !payload.contains("code")) payload["code"] = "late";
    Envelope rep{Kind::Rep, e.channel, e.seq, 0, std::move(payload)};
    if (defer > 0.0) {
        const auto wait = static_cast<std::uint64_t>(std::ceil(defer * 1e9 / static_cast<double>(tick_ns_)));
        deferred_.push_back({ticks_ + wait, t.from, std::move(rep)});
        return;
    }
    rep.stamp = sim_stamp();
    reply(t.from, std::move(rep));
}

void Node::handle_param(const Timed& t) {
    const Envelope& e = t.envelope;
    if (e.kind == Kind::ParamSet) {
        const auto value = param_from_json(e.payload.at("value"));
        const Outcome o = vehicle_.set_param(e.channel, *value);
        if (!o.ok) {
            reply(t.from, protocol::make_error(e.channel, e.seq, sim_stamp(), o.code, o.message));
            return;
        }
    }
    reply(t.from, {Kind::ParamVal, e.channel, e.seq, sim_stamp(),
                   {{"value", param_to_json(vehicle_.params().get(e.channel))}}});
    // after the reply, so a client matching on seq sees the value first
    if (t.late) notice(e.channel, e.seq, "late", "stamp already passed; applied now", t.from);
}

void Node::handle_subscription(const Timed& t) {
    const Envelope& e = t.envelope;
    const auto it = std::find_if(topics_.begin(), topics_.end(), [&](const Published& p) { return p.name == e.channel; });
    std::string message;
    if (e.kind == Kind::Sub) {
        if (std::find(sinks_.begin(), sinks_.end(), t.from) == sinks_.end()) sinks_.push_back(t.from);
        message = it->subscribers.insert(t.from.get()).second ? "subscribed" : "already subscribed";
    } else {
        message = it->subscribers.erase(t.from.get()) ? "unsubscribed" : "not subscribed";
        t.from->outbox().purge(e.channel);
    }
    reply(t.from, {Kind::Rep, e.channel, e.seq, sim_stamp(), {{"success", true}, {"message", message}}});
}

void Node::reply(const std::shared_ptr<Sink>& to, Envelope e) {
    if (!to) return;
    const std::uint64_t seq = e.seq;
    const std::string channel = e.channel;
    FramePtr frame;
    try {
        frame = make_frame(std::move(e));
    } catch (const protocol::EncodeError& ex) {
        // e.g. a download reply larger than a frame
        frame = make_frame(protocol::make_error(channel, seq, sim_stamp(), "frame_too_large", ex.what()));
    }
    to->outbox().push(std::move(frame));
}

void Node::notice(const std::string& channel, std::uint64_t seq, const std::string& code, const std::string& message,
                  const std::shared_ptr<Sink>& to) {
    if (code == "warning" || code == "clamped") {
        // at most one warning per channel per simulated second
        const auto per_second = static_cast<std::uint64_t>(1e9 / static_cast<double>(tick_ns_));
        const auto it = last_warning_.find(channel);
        if (it != last_warning_.end() && ticks_ < it->second + per_second) return;
        last_warning_[channel] = ticks_;
    }
    auto frame = make_frame(protocol::make_error(channel, seq, sim_stamp(), code, message));
    if (to) {
        to->outbox().push(frame);
        return;
    }
    for (const auto& s : sinks_) s->outbox().push(frame);
}

void Node::step() {
    const std::uint64_t n = ticks_;
    vehicle_.tick();
    ticks_ = n + 1;
    for (auto& ev : vehicle_.drain_events()) notice(ev.channel, 0, ev.code, ev.message);
    for (auto it = deferred_.begin(); it != deferred_.end();) {
        if (it->tick <= ticks_) {
            it->reply.stamp = sim_stamp();
            reply(it->to, std::move(it->reply));
            it = deferred_.erase(it);
        } else {
            ++it;
        }
    }
    publish();
}

void Node::publish() {
    const std::uint64_t n = ticks_ - 1;  // index of the tick just run
    const auto f = tick_rate_mhz_;
    const bool block = config_.realtime_factor <= 0.0;
    for (auto& t : topics_) {
        if (t.subscribers.empty()) continue;
        const auto before = static_cast<std::int64_t>(n) * t.rate_mhz / f;
        const auto after = static_cast<std::int64_t>(n + 1) * t.rate_mhz / f;
        if (after == before) continue;
        const std::uint64_t stamp = sim_stamp();
        const auto seq = static_cast<std::uint64_t>(after);
        auto frame = make_frame({Kind::Pub, std::string(t.name), seq, stamp,
                                 telemetry_payload(vehicle_, t.name, stamp, seq)});
        const std::string topic(t.name);
        for (auto* s : t.subscribers) {
            const auto wait = block && s->backpressure() ? kStallBudget : std::chrono::milliseconds(0);
            s->outbox().push_topic(topic, frame, wait);
        }
    }
}

void Node::forget(Sink* sink) {
    for (auto& t : topics_) t.subscribers.erase(sink);
    std::erase_if(sinks_, [&](const auto& s) { return s.get() == sink; });
    std::erase_if(deferred_, [&](const Deferred& d) { return d.to.get() == sink; });
}

json Node::hello() const {
    return {{"success", true},
            {"message", "connected to " + name()},
            {"version", kDaemonVersion},
            {"protocol", kProtocolVersion},
            {"name", name()},
            {"model", to_string(model())},
            {"tick_rate", config_.vehicle.tick_rate},
            {"realtime_factor", config_.realtime_factor},
            {"epoch", config_.epoch_ns},
            {"sim_stamp", sim_stamp()}};
}

}  // namespace anafi::simd
