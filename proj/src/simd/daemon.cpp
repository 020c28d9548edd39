#include "anafi/simd/daemon.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "anafi/geometry.hpp"
#include "anafi/simd/ws_bridge.hpp"

namespace anafi::simd {

using nlohmann::json;
using protocol::Envelope;
using protocol::Kind;

Daemon::Daemon(FleetConfig config) : config_(std::move(config)) {
    validate(config_);
    const auto wall = std::chrono::system_clock::now().time_since_epoch();
    epoch_ns_ = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::seconds>(wall).count()) * 1'000'000'000ull;
}

Daemon::~Daemon() { stop(); }

Node* Daemon::find(std::string_view name) {
    for (auto& n : nodes_) {
        if (n->name() == name) return n.get();
    }
    return nullptr;
}

std::optional<std::uint16_t> Daemon::ws_port() const {
    if (!ws_) return std::nullopt;
    return ws_->port();
}

json Daemon::fleet_info() const {
    json drones = json::array();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        drones.push_back({{"name", nodes_[i]->name()},
                          {"model", to_string(nodes_[i]->model())},
                          {"port", i < listeners_.size() ? listeners_[i]->port() : config_.drone_port(i)}});
    }
    return {{"drones", drones}};
}

void Daemon::start() {
    if (running_) return;
    for (const auto& d : config_.drones) {
        NodeConfig nc;
        nc.vehicle.name = d.name;
        nc.vehicle.model = d.model;
        nc.vehicle.start = d.start;
        nc.vehicle.initial_yaw = -deg2rad(d.heading_deg);
        nc.vehicle.ground_station = config_.ground_station;
        nc.vehicle.tick_rate = config_.tick_rate;
        nc.vehicle.require_arming = config_.require_arming;
        nc.realtime_factor = config_.realtime_factor;
        nc.epoch_ns = epoch_ns_;
        nc.fleet_info = [this] { return fleet_info(); };
        nodes_.push_back(std::make_unique<Node>(std::move(nc)));
    }
    try {
        SessionHandlers fleet_handlers;
        fleet_handlers.on_envelope = [this](Envelope e, const std::shared_ptr<Sink>& from) {
            if (e.kind == Kind::Req && e.channel == "fleet/info") {
                json payload = fleet_info();
                payload["success"] = true;
                payload["message"] = std::to_string(nodes_.size()) + " drones";
                from->outbox().push(make_frame({Kind::Rep, e.channel, e.seq, 0, std::move(payload)}));
            } else {
                from->outbox().push(make_frame(protocol::make_error(e.channel, e.seq, 0, "unknown_channel",
                                                                    "the fleet-info endpoint only answers fleet/info")));
            }
        };
        fleet_ = std::make_unique<Listener>(config_.host, config_.fleet_port(), "fleet", fleet_handlers);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            Node* node = nodes_[i].get();
            SessionHandlers h;
            h.on_open = [node](const std::shared_ptr<Sink>& s) { node->attach(s); };
            h.on_envelope = [node](Envelope e, const std::shared_ptr<Sink>& s) { node->post(std::move(e), s); };
            h.on_close = [node](const std::shared_ptr<Sink>& s) { node->detach(s); };
            listeners_.push_back(std::make_unique<Listener>(config_.host, config_.drone_port(i), node->name(), h));
        }
        if (config_.ws_port) {
            std::vector<Node*> nodes;
            for (auto& n : nodes_) nodes.push_back(n.get());
            ws_ = std::make_unique<WsBridge>(config_.host, *config_.ws_port, nodes, [this] { return fleet_info(); });
        }
    } catch (...) {
        ws_.reset();
        listeners_.clear();
        fleet_.reset();
        nodes_.clear();
        throw;
    }
    fleet_->start();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        listeners_[i]->start();
        nodes_[i]->mark_ready();
        nodes_[i]->start();
        spdlog::info("drone '{}' ({}) on port {}", nodes_[i]->name(), to_string(nodes_[i]->model()),
                     listeners_[i]->port());
    }
    spdlog::info("fleet info on port {}", fleet_->port());
    if (ws_) {
        ws_->start();
        spdlog::info("websocket bridge on port {}", ws_->port());
    }
    running_ = true;
}

void Daemon::stop() {
    if (!running_) return;
    running_ = false;
    if (ws_) ws_->stop();
    if (fleet_) fleet_->stop();
    for (auto& l : listeners_) l->stop();
    for (auto& n : nodes_) n->stop();
    ws_.reset();
    listeners_.clear();
    fleet_.reset();
    nodes_.clear();
}

}  // namespace anafi::simd
