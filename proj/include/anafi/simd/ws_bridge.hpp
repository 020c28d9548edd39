// WebSocket transport for browser clients. Each text frame carries one
// envelope body. Channels are prefixed "<drone>/" so one session can reach the
// whole fleet; with ?drone=<name> in the URL unprefixed channels go to that
// drone and its traffic comes back unprefixed.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "anafi/simd/node.hpp"

namespace anafi::simd {

class WsBridge {
public:
    WsBridge(const std::string& host, std::uint16_t port, std::vector<Node*> nodes,
             std::function<nlohmann::json()> fleet_info);
    ~WsBridge();

    void start();
    void stop();
    std::uint16_t port() const;

    struct State;

private:
    std::shared_ptr<State> state_;
    std::thread thread_;
};

}  // namespace anafi::simd
