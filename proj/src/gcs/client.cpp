#include "anafi/gcs/client.hpp"

#include <sys/socket.h>

#include <cerrno>

#include "anafi/protocol/registry.hpp"
#include "anafi/protocol/socket.hpp"

namespace anafi::gcs {

using nlohmann::json;
using protocol::Envelope;
using protocol::Kind;

namespace {

std::string describe(const Envelope& e) {
    const auto& p = e.payload;
    std::string code = p.value("code", std::string("error"));
    return e.channel + ": " + code + ": " + p.value("message", std::string());
}

}  // namespace

DroneClient::DroneClient(const std::string& host, std::uint16_t port) {
    try {
        fd_ = protocol::connect_tcp(host, port);
    } catch (const std::exception& e) {
        throw ConnectionError(e.what());
    }
    reader_ = std::thread([this] { read_loop(); });
}

DroneClient::~DroneClient() {
    close();
    if (reader_.joinable()) reader_.join();
    protocol::close_fd(fd_);
}

void DroneClient::close() {
    if (connected_.exchange(false)) ::shutdown(fd_, SHUT_RDWR);
}

void DroneClient::fail_all(const std::string& why) {
    std::map<std::uint64_t, Pending> pending;
    {
        std::lock_guard lock(mutex_);
        pending.swap(pending_);
    }
    for (auto& [seq, p] : pending) {
        if (p.callback) {
            p.callback(protocol::make_error("", seq, 0, "disconnected", why));
            continue;
        }
        p.promise.set_exception(std::make_exception_ptr(ConnectionError(why)));
    }
}

void DroneClient::read_loop() {
    std::string buffer;
    std::size_t offset = 0;
    char chunk[65536];
    while (true) {
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        while (true) {
            auto r = protocol::decode(std::string_view(buffer).substr(offset));
            if (r.error == protocol::DecodeError::NeedMoreBytes) break;
            offset += r.consumed;
            if (!r.ok()) {
                Handler notice;
                {
                    std::lock_guard lock(mutex_);
                    notice = notice_;
                }
                if (notice) {
                    notice(protocol::make_error(r.channel, r.seq, 0, std::string(protocol::to_string(r.error)),
                                                "undecodable frame from daemon: " + r.reason));
                }
                if (r.error == protocol::DecodeError::FrameTooLarge) {
                    close();
                    break;
                }
                continue;
            }
            Envelope& e = *r.envelope;
            if (e.kind == Kind::Pub) {
                Handler h;
                {
                    std::lock_guard lock(mutex_);
                    const auto it = handlers_.find(e.channel);
                    if (it != handlers_.end()) h = it->second;
                }
                if (h) h(e);
                continue;
            }
            std::optional<Pending> p;
            Handler notice;
            {
                std::lock_guard lock(mutex_);
                const auto it = pending_.find(e.seq);
                const bool reply = e.kind == Kind::Rep || e.kind == Kind::ParamVal || e.kind == Kind::Err;
                if (reply && it != pending_.end()) {
                    p = std::move(it->second);
                    pending_.erase(it);
                } else {
                    notice = notice_;
                }
            }
            if (p) {
                if (p->callback) p->callback(e);
                else p->promise.set_value(std::move(e));
            } else if (notice) {
                notice(e);
            }
        }
        if (offset > 0 && offset * 2 >= buffer.size()) {
            buffer.erase(0, offset);
            offset = 0;
        }
    }
    connected_ = false;
    fail_all("connection closed");
}

std::uint64_t DroneClient::send(Envelope& e, Pending pending, bool expect_reply) {
    if (!connected_) throw ConnectionError("not connected");
    e.seq = seq_++;
    std::string wire;
    try {
        wire = protocol::encode(e);
    } catch (const protocol::EncodeError& ex) {
        throw ProtocolError("invalid", ex.what());
    }
    if (expect_reply) {
        std::lock_guard lock(mutex_);
        pending_.emplace(e.seq, std::move(pending));
    }
    std::lock_guard lock(write_mutex_);
    if (!protocol::write_all(fd_, wire)) {
        if (expect_reply) {
            std::lock_guard plock(mutex_);
            pending_.erase(e.seq);
        }
        throw ConnectionError("write failed");
    }
    return e.seq;
}

std::future<Envelope> DroneClient::request(Envelope envelope) {
    Pending p;
    auto f = p.promise.get_future();
    send(envelope, std::move(p), true);
    return f;
}

void DroneClient::request_async(Envelope envelope, std::function<void(const Envelope&)> done) {
    Pending p;
    p.callback = std::move(done);
    send(envelope, std::move(p), true);
}

Envelope DroneClient::await(std::future<Envelope>& f, std::chrono::milliseconds timeout, const std::string& what) {
    if (f.wait_for(timeout) != std::future_status::ready) throw TimeoutError(what + ": no reply within " +
                                                                             std::to_string(timeout.count()) + " ms");
    Envelope e = f.get();
    if (e.kind == Kind::Err) throw ProtocolError(e.payload.value("code", std::string("error")), describe(e));
    return e;
}

const json& DroneClient::hello(std::chrono::milliseconds timeout) {
    info_ = call("connection/hello", {{"client", "gcs"}, {"version", "1.0.0"}}, timeout);
    return info_;
}

void DroneClient::subscribe(const std::string& topic, Handler handler, std::chrono::milliseconds timeout) {
    {
        std::lock_guard lock(mutex_);
        handlers_[topic] = std::move(handler);
    }
    auto f = request({Kind::Sub, topic, 0, 0, json::object()});
    await(f, timeout, "subscribe " + topic);
}

void DroneClient::unsubscribe(const std::string& topic, std::chrono::milliseconds timeout) {
    auto f = request({Kind::Unsub, topic, 0, 0, json::object()});
    await(f, timeout, "unsubscribe " + topic);
    std::lock_guard lock(mutex_);
    handlers_.erase(topic);
}

void DroneClient::on_notice(Handler handler) {
    std::lock_guard lock(mutex_);
    notice_ = std::move(handler);
}

void DroneClient::publish(const std::string& topic, json payload, std::uint64_t stamp) {
    Envelope e{Kind::Pub, topic, 0, stamp, std::move(payload)};
    send(e, {}, false);
}

json DroneClient::call(const std::string& service, json request, std::chrono::milliseconds timeout) {
    if (!protocol::find_service(service)) throw ProtocolError("unknown_channel", "unknown service '" + service + "'");
    auto f = this->request({Kind::Req, service, 0, 0, std::move(request)});
    Envelope e = await(f, timeout, service);
    if (!e.payload.value("success", false)) {
        throw RemoteError(e.payload.value("code", std::string("failed")), describe(e));
    }
    return e.payload;
}

json DroneClient::param_get(const std::string& name, std::chrono::milliseconds timeout) {
    auto f = request({Kind::ParamGet, name, 0, 0, json::object()});
    return await(f, timeout, name).payload.at("value");
}

json DroneClient::param_set(const std::string& name, json value, std::uint64_t stamp, std::chrono::milliseconds timeout) {
    auto f = request({Kind::ParamSet, name, 0, stamp, {{"value", std::move(value)}}});
    return await(f, timeout, name).payload.at("value");
}

json fleet_info(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
    DroneClient c(host, port);
    return c.call("fleet/info", json::object(), timeout).at("drones");
}

}  // namespace anafi::gcs
