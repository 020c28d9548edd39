// One drone runner: owns a Vehicle, advances it at the tick rate (scaled by the
// realtime factor), applies client requests at their stamped tick and fans
// telemetry out to subscribed clients.
#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "anafi/protocol/envelope.hpp"
#include "anafi/simd/outbox.hpp"
#include "anafi/vehicle.hpp"

namespace anafi::simd {

inline constexpr double kMaxAcceleration = 1000.0;
inline constexpr auto kStallBudget = std::chrono::milliseconds(2000);
inline constexpr std::size_t kMaxPending = 4096;
inline constexpr std::string_view kDaemonVersion = "1.0.0";
inline constexpr int kProtocolVersion = 1;

struct NodeConfig {
    VehicleConfig vehicle;
    double realtime_factor{1.0};  // 0 runs as fast as possible (capped)
    std::uint64_t epoch_ns{0};    // sim stamp of tick 0
    std::function<nlohmann::json()> fleet_info;
};

class Node {
public:
    explicit Node(NodeConfig config);
    ~Node();

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    void start();
    void stop();

    /// Thread-safe entry points; everything is applied on the runner thread.
    void post(protocol::Envelope request, std::shared_ptr<Sink> from);
    void attach(std::shared_ptr<Sink> sink);
    void detach(std::shared_ptr<Sink> sink);
    void mark_ready();

    const std::string& name() const { return config_.vehicle.name; }
    DroneModel model() const { return config_.vehicle.model; }
    double realtime_factor() const { return config_.realtime_factor; }
    std::uint64_t ticks() const { return ticks_.load(); }
    std::uint64_t sim_stamp() const { return stamp_at(ticks_.load()); }
    std::uint64_t epoch_ns() const { return config_.epoch_ns; }
    std::uint64_t tick_ns() const { return tick_ns_; }

    /// Runs `n` ticks on the calling thread (no pacing). Only for use before
    /// start() or after stop().
    void run_ticks(std::uint64_t n);

private:
    enum class Control { Request, Attach, Detach, Ready };

    struct Inbound {
        Control control{Control::Request};
        protocol::Envelope envelope;
        std::shared_ptr<Sink> from;
    };

    struct Timed {
        std::uint64_t tick;
        std::uint64_t arrival;
        bool late;
        protocol::Envelope envelope;
        std::shared_ptr<Sink> from;

        bool operator>(const Timed& o) const { return tick != o.tick ? tick > o.tick : arrival > o.arrival; }
    };

    struct Deferred {
        std::uint64_t tick;
        std::shared_ptr<Sink> to;
        protocol::Envelope reply;
    };

    struct Published {
        std::string_view name;
        std::int64_t rate_mhz;
        std::set<Sink*> subscribers;
    };

    std::uint64_t stamp_at(std::uint64_t tick) const { return config_.epoch_ns + tick * tick_ns_; }
    void loop();
    void drain_inbox();
    void apply_due();
    void step();
    void apply(Timed& t);
    void handle_request(const Timed& t);
    void handle_param(const Timed& t);
    void handle_subscription(const Timed& t);
    void reply(const std::shared_ptr<Sink>& to, protocol::Envelope e);
    void notice(const std::string& channel, std::uint64_t seq, const std::string& code, const std::string& message,
                const std::shared_ptr<Sink>& to = nullptr);
    void publish();
    void forget(Sink* sink);
    nlohmann::json hello() const;

    NodeConfig config_;
    Vehicle vehicle_;
    std::uint64_t tick_ns_;
    std::int64_t tick_rate_mhz_;
    std::atomic<std::uint64_t> ticks_{0};

    std::mutex inbox_mutex_;
    std::condition_variable inbox_cv_;
    std::vector<Inbound> inbox_;
    std::atomic<bool> inbox_flag_{false};
    std::atomic<bool> running_{false};
    std::thread thread_;

    // runner-thread state
    std::uint64_t arrivals_{0};
    std::priority_queue<Timed, std::vector<Timed>, std::greater<>> pending_;
    std::vector<Deferred> deferred_;
    std::vector<std::shared_ptr<Sink>> sinks_;
    std::vector<Published> topics_;
    std::map<std::string, std::uint64_t> last_warning_;  // channel -> tick
};

}  // namespace anafi::simd
