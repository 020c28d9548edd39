// Framed stream sessions and accept loops shared by the drone endpoints and
// the fleet-info endpoint.
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "anafi/protocol/envelope.hpp"
#include "anafi/protocol/socket.hpp"
#include "anafi/simd/outbox.hpp"

namespace anafi::simd {

class TcpSession;

struct SessionHandlers {
    std::function<void(protocol::Envelope, const std::shared_ptr<Sink>&)> on_envelope;
    std::function<void(const std::shared_ptr<Sink>&)> on_open;
    std::function<void(const std::shared_ptr<Sink>&)> on_close;
};

/// One accepted connection: a reader thread feeding decoded envelopes to the
/// handler and a writer thread draining the sink's outbox.
class TcpSession {
public:
    TcpSession(int fd, std::string label, SessionHandlers handlers);
    ~TcpSession();

    void start();
    void close();
    bool finished() const { return reader_done_ && writer_done_; }
    const std::shared_ptr<Sink>& sink() const { return sink_; }

private:
    void read_loop();
    void write_loop();
    void send_error(const protocol::DecodeResult& r);

    int fd_;
    std::shared_ptr<Sink> sink_;
    SessionHandlers handlers_;
    std::thread reader_;
    std::thread writer_;
    std::atomic<bool> reader_done_{false};
    std::atomic<bool> writer_done_{false};
    std::once_flag shutdown_;
};

/// Accept loop for one port.
class Listener {
public:
    Listener(std::string host, std::uint16_t port, std::string label, SessionHandlers handlers);
    ~Listener();

    void start();
    void stop();
    std::uint16_t port() const { return port_; }
    std::size_t sessions() const;

private:
    void accept_loop();
    void reap();

    std::uint16_t port_{0};  // written by listen_tcp while fd_ is initialised
    int fd_;
    std::string label_;
    SessionHandlers handlers_;
    std::atomic<bool> running_{false};
    std::thread thread_;
    mutable std::mutex mutex_;
    std::vector<std::unique_ptr<TcpSession>> sessions_;
    std::uint64_t accepted_{0};
};

}  // namespace anafi::simd
