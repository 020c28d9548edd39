// The closed channel registry: every topic, service and parameter name the
// daemon understands, with message types and publication rates.
#pragma once

#include <span>
#include <string_view>

#include "anafi/protocol/schema.hpp"

namespace anafi::protocol {

struct TopicInfo {
    std::string_view name;
    std::string_view type;
    double rate_hz{0.0};        // publication rate; 0 for command topics
    bool rate_declared{false};  // false where the rate is our own choice
    bool client_publishable{false};
    std::string_view description;
};

struct ServiceInfo {
    std::string_view name;
    std::string_view type;
    std::string_view description;
    bool plumbing{false};  // connection handling, not part of the drone API
};

/// Telemetry published by the daemon, sorted by name.
std::span<const TopicInfo> published_topics();
/// Command topics accepted from clients, sorted by name.
std::span<const TopicInfo> subscribed_topics();
/// Drone services, sorted by name (plumbing excluded).
std::span<const ServiceInfo> services();
std::span<const ServiceInfo> plumbing_services();

const TopicInfo* find_published(std::string_view name);
const TopicInfo* find_subscribed(std::string_view name);
const ServiceInfo* find_service(std::string_view name);  // includes plumbing
bool is_parameter(std::string_view name);

const Schema& message_schema(std::string_view type);
const Schema& request_schema(const ServiceInfo& service);
const Schema& response_schema(const ServiceInfo& service);
const Schema& param_set_schema();
const Schema& param_value_schema();
const Schema& empty_schema();
const Schema& error_schema();

}  // namespace anafi::protocol
