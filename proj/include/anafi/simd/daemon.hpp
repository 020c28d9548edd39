// The simulator daemon: one runner and one endpoint per drone, a fleet-info
// endpoint, and optionally the WebSocket bridge.
#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "anafi/simd/config.hpp"
#include "anafi/simd/net.hpp"
#include "anafi/simd/node.hpp"

namespace anafi::simd {

class WsBridge;

class Daemon {
public:
    explicit Daemon(FleetConfig config);
    ~Daemon();

    /// Binds every endpoint and starts the runners. Throws when a port is taken.
    void start();
    void stop();

    const FleetConfig& config() const { return config_; }
    std::size_t size() const { return nodes_.size(); }
    Node& node(std::size_t i) { return *nodes_[i]; }
    Node* find(std::string_view name);
    std::uint16_t port(std::size_t i) const { return listeners_.at(i)->port(); }
    std::uint16_t fleet_port() const { return fleet_->port(); }
    std::optional<std::uint16_t> ws_port() const;
    /// Open client connections on drone i's endpoint.
    std::size_t sessions(std::size_t i) const { return listeners_.at(i)->sessions(); }

    nlohmann::json fleet_info() const;

private:
    FleetConfig config_;
    std::uint64_t epoch_ns_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::vector<std::unique_ptr<Listener>> listeners_;
    std::unique_ptr<Listener> fleet_;
    std::unique_ptr<WsBridge> ws_;
    bool running_{false};
};

}  // namespace anafi::simd
