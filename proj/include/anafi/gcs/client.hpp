// Ground-station SDK: one connection to one drone endpoint.
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "json.hpp"

#include "anafi/protocol/envelope.hpp"

namespace anafi::gcs {

struct ConnectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The peer rejected or could not parse what we sent, or sent garbage.
struct ProtocolError : std::runtime_error {
    ProtocolError(std::string code, const std::string& what) : std::runtime_error(what), code(std::move(code)) {}
    std::string code;
};

/// A service ran and reported failure.
struct RemoteError : std::runtime_error {
    RemoteError(std::string code, const std::string& what) : std::runtime_error(what), code(std::move(code)) {}
    std::string code;
};

inline constexpr auto kDefaultTimeout = std::chrono::milliseconds(2000);

class DroneClient {
public:
    using Handler = std::function<void(const protocol::Envelope&)>;

    /// Connects. Throws ConnectionError.
    DroneClient(const std::string& host, std::uint16_t port);
    ~DroneClient();

    DroneClient(const DroneClient&) = delete;
    DroneClient& operator=(const DroneClient&) = delete;

    void close();
    bool connected() const { return connected_; }

    /// connection/hello; the reply is kept in info().
    const nlohmann::json& hello(std::chrono::milliseconds timeout = kDefaultTimeout);
    const nlohmann::json& info() const { return info_; }

    /// Handlers run on the receive thread, in seq order per topic. They must
    /// not block on calls to this client.
    void subscribe(const std::string& topic, Handler handler, std::chrono::milliseconds timeout = kDefaultTimeout);
    void unsubscribe(const std::string& topic, std::chrono::milliseconds timeout = kDefaultTimeout);
    /// Asynchronous errors and notices not tied to a pending request.
    void on_notice(Handler handler);

    /// `stamp` 0 applies on arrival; otherwise at that simulated time (ns).
    void publish(const std::string& topic, nlohmann::json payload, std::uint64_t stamp = 0);

    /// Blocking service call. Throws RemoteError when the reply has
    /// success=false, ProtocolError on ERR, TimeoutError, ConnectionError.
    nlohmann::json call(const std::string& service, nlohmann::json request = nlohmann::json::object(),
                        std::chrono::milliseconds timeout = kDefaultTimeout);

    /// Sends any envelope and resolves with the matching REP/PARAM_VAL/ERR.
    /// The seq is assigned here. Throws ProtocolError when the envelope is
    /// invalid.
    std::future<protocol::Envelope> request(protocol::Envelope envelope);

    /// Callback style: `done` runs on the receive thread.
    void request_async(protocol::Envelope envelope, std::function<void(const protocol::Envelope&)> done);

    nlohmann::json param_get(const std::string& name, std::chrono::milliseconds timeout = kDefaultTimeout);
    /// Returns the stored value (which may have been clamped).
    nlohmann::json param_set(const std::string& name, nlohmann::json value, std::uint64_t stamp = 0,
                             std::chrono::milliseconds timeout = kDefaultTimeout);

    /// Waits for a future obtained from request(); maps ERR to ProtocolError.
    static protocol::Envelope await(std::future<protocol::Envelope>& f, std::chrono::milliseconds timeout,
                                    const std::string& what);

private:
    struct Pending {
        std::promise<protocol::Envelope> promise;
        std::function<void(const protocol::Envelope&)> callback;
    };

    std::uint64_t send(protocol::Envelope& e, Pending pending, bool expect_reply);
    void read_loop();
    void fail_all(const std::string& why);

    int fd_;
    std::atomic<bool> connected_{true};
    std::atomic<std::uint64_t> seq_{1};
    std::mutex write_mutex_;
    std::mutex mutex_;  // pending_, handlers_, notice_
    std::map<std::uint64_t, Pending> pending_;
    std::map<std::string, Handler> handlers_;
    Handler notice_;
    nlohmann::json info_;
    std::thread reader_;
};

/// Queries a fleet-info endpoint: [{name, model, port}].
nlohmann::json fleet_info(const std::string& host, std::uint16_t port,
                          std::chrono::milliseconds timeout = kDefaultTimeout);

}  // namespace anafi::gcs
