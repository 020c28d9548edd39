#include "anafi/simd/net.hpp"

#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace anafi::simd {

using protocol::DecodeError;
using protocol::listen_tcp;
using protocol::write_all;

TcpSession::TcpSession(int fd, std::string label, SessionHandlers handlers)
    : fd_(fd), sink_(std::make_shared<Sink>(std::move(label), true)), handlers_(std::move(handlers)) {
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpSession::~TcpSession() {
    close();
    if (reader_.joinable()) reader_.join();
    if (writer_.joinable()) writer_.join();
    ::close(fd_);
}

void TcpSession::start() {
    if (handlers_.on_open) handlers_.on_open(sink_);
    writer_ = std::thread([this] { write_loop(); });
    reader_ = std::thread([this] { read_loop(); });
}

void TcpSession::close() {
    std::call_once(shutdown_, [this] {
        ::shutdown(fd_, SHUT_RDWR);
        sink_->outbox().close();
    });
}

void TcpSession::send_error(const protocol::DecodeResult& r) {
    sink_->outbox().push(make_frame(
        protocol::make_error(r.channel, r.seq, 0, std::string(protocol::to_string(r.error)), r.reason)));
}

void TcpSession::read_loop() {
    std::string buffer;
    std::size_t offset = 0;
    char chunk[65536];
    while (true) {
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        bool fatal = false;
        while (true) {
            const auto r = protocol::decode(std::string_view(buffer).substr(offset));
            if (r.error == DecodeError::NeedMoreBytes) break;
            offset += r.consumed;
            if (r.ok()) {
                handlers_.on_envelope(std::move(*r.envelope), sink_);
                continue;
            }
            send_error(r);
            if (r.error == DecodeError::FrameTooLarge) {
                fatal = true;
                break;
            }
        }
        if (fatal) break;
        if (offset > 0 && offset * 2 >= buffer.size()) {
            buffer.erase(0, offset);
            offset = 0;
        }
    }
    if (handlers_.on_close) handlers_.on_close(sink_);
    // let queued replies (including a final error) drain before closing
    for (int i = 0; i < 100 && sink_->outbox().size() > 0 && !writer_done_; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    close();
    reader_done_ = true;
}

void TcpSession::write_loop() {
    while (auto frame = sink_->outbox().pop()) {
        if (!write_all(fd_, (*frame)->wire)) break;
    }
    close();
    writer_done_ = true;
}

Listener::Listener(std::string host, std::uint16_t port, std::string label, SessionHandlers handlers)
    : fd_(listen_tcp(host, port, &port_)), label_(std::move(label)), handlers_(std::move(handlers)) {}

Listener::~Listener() {
    stop();
    ::close(fd_);
}

void Listener::start() {
    running_ = true;
    thread_ = std::thread([this] { accept_loop(); });
}

void Listener::stop() {
    if (!running_.exchange(false)) return;
    if (thread_.joinable()) thread_.join();
    std::vector<std::unique_ptr<TcpSession>> sessions;
    {
        std::lock_guard lock(mutex_);
        sessions.swap(sessions_);
    }
    for (auto& s : sessions) s->close();
    sessions.clear();
}

std::size_t Listener::sessions() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& s : sessions_) n += !s->finished();
    return n;
}

void Listener::reap() {
    std::vector<std::unique_ptr<TcpSession>> done;
    {
        std::lock_guard lock(mutex_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            if ((*it)->finished()) {
                done.push_back(std::move(*it));
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }
}

void Listener::accept_loop() {
    while (running_) {
        pollfd p{fd_, POLLIN, 0};
        const int ready = ::poll(&p, 1, 100);
        reap();
        if (ready <= 0) continue;
        const int client = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (client < 0) continue;
        auto session = std::make_unique<TcpSession>(client, label_ + "#" + std::to_string(++accepted_), handlers_);
        spdlog::debug("{}: client {} connected", label_, accepted_);
        session->start();
        std::lock_guard lock(mutex_);
        sessions_.push_back(std::move(session));
    }
}

}  // namespace anafi::simd
