// Per-client outgoing queue. Telemetry is bounded per topic (drop-oldest);
// replies and notices are kept in order and never dropped.
#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "anafi/protocol/envelope.hpp"

namespace anafi::simd {

struct Frame {
    protocol::Envelope envelope;
    std::string wire;  // length-prefixed encoding of `envelope`
};

using FramePtr = std::shared_ptr<const Frame>;

FramePtr make_frame(protocol::Envelope e);

class Outbox {
public:
    explicit Outbox(std::size_t depth = 64) : depth_(depth) {}

    /// When `topic` already holds `depth` frames, waits up to `wait` for the
    /// reader, then drops the oldest. Once a wait expires the box counts as
    /// stalled and later pushes drop without waiting until the reader moves.
    void push_topic(const std::string& topic, FramePtr frame, std::chrono::milliseconds wait = {});
    void push(FramePtr frame);

    /// Blocks until a frame is available; nullopt once closed.
    std::optional<FramePtr> pop();
    std::optional<FramePtr> try_pop();

    void purge(const std::string& topic);
    void close();
    bool closed() const;

    std::size_t size() const;
    std::size_t queued(const std::string& topic) const;
    std::uint64_t dropped() const;

    /// Called (outside the lock) after every push.
    void set_wakeup(std::function<void()> fn) { wakeup_ = std::move(fn); }

private:
    struct Item {
        std::string topic;  // empty for replies
        FramePtr frame;
    };

    std::optional<FramePtr> take_locked();

    mutable std::mutex mutex_;
    std::condition_variable readable_;
    std::condition_variable writable_;
    std::deque<Item> items_;
    std::map<std::string, std::size_t, std::less<>> counts_;
    std::size_t depth_;
    bool closed_{false};
    bool stalled_{false};
    std::uint64_t dropped_{0};
    std::function<void()> wakeup_;
};

/// One client as seen by a drone runner.
class Sink {
public:
    Sink(std::string label, bool backpressure) : label_(std::move(label)), backpressure_(backpressure) {}

    Outbox& outbox() { return outbox_; }
    const std::string& label() const { return label_; }
    /// Whether an accelerated runner may wait for this client.
    bool backpressure() const { return backpressure_; }

private:
    std::string label_;
    bool backpressure_;
    Outbox outbox_;
};

}  // namespace anafi::simd
