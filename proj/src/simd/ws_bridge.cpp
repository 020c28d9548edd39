#include "anafi/simd/ws_bridge.hpp"

#include <deque>
#include <map>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

namespace anafi::simd {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;
using protocol::Envelope;
using protocol::Kind;

struct WsBridge::State {
    asio::io_context io;
    tcp::acceptor acceptor{io};
    std::vector<Node*> nodes;
    std::function<json()> fleet_info;
    std::uint16_t port{0};
    std::vector<std::weak_ptr<class WsSessionBase>> sessions;
};

namespace {

std::string query_value(std::string_view target, std::string_view key) {
    const auto q = target.find('?');
    if (q == std::string_view::npos) return {};
    std::string_view rest = target.substr(q + 1);
    while (!rest.empty()) {
        const auto amp = rest.find('&');
        const std::string_view pair = rest.substr(0, amp);
        const auto eq = pair.find('=');
        if (pair.substr(0, eq) == key && eq != std::string_view::npos) return std::string(pair.substr(eq + 1));
        if (amp == std::string_view::npos) break;
        rest.remove_prefix(amp + 1);
    }
    return {};
}

}  // namespace

class WsSessionBase {
public:
    virtual ~WsSessionBase() = default;
    virtual void shutdown() = 0;
};

namespace {

class WsSession : public WsSessionBase, public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, std::shared_ptr<WsBridge::State> state)
        : ws_(std::move(socket)), state_(std::move(state)) {}

    void run() {
        http::async_read(ws_.next_layer(), buffer_, request_,
                         [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
    }

private:
    struct Route {
        Node* node;
        std::shared_ptr<Sink> sink;
    };

    void on_request(beast::error_code ec) {
        if (ec) return;
        const std::string target(request_.target());
        const std::string drone = query_value(target, "drone");
        if (!drone.empty()) {
            default_ = find(drone);
            if (!default_) {
                http::response<http::string_body> res{http::status::not_found, request_.version()};
                res.body() = "unknown drone " + drone + "\n";
                res.prepare_payload();
                http::write(ws_.next_layer(), res, ec);
                return;
            }
        }
        if (!websocket::is_upgrade(request_)) return;
        ws_.text(true);
        ws_.async_accept(request_, [self = shared_from_this()](beast::error_code e) {
            if (e) return;
            if (self->default_) self->route(self->default_);
            self->read();
        });
    }

    Node* find(std::string_view name) const {
        for (Node* n : state_->nodes) {
            if (n->name() == name) return n;
        }
        return nullptr;
    }

    Route& route(Node* node) {
        auto it = routes_.find(node);
        if (it != routes_.end()) return it->second;
        auto sink = std::make_shared<Sink>("ws:" + node->name(), false);
        std::weak_ptr<WsSession> weak = weak_from_this();
        std::weak_ptr<WsBridge::State> state = state_;
        sink->outbox().set_wakeup([weak, state] {
            if (auto st = state.lock()) {
                asio::post(st->io, [weak] {
                    if (auto self = weak.lock()) self->pump();
                });
            }
        });
        node->attach(sink);
        return routes_.emplace(node, Route{node, sink}).first->second;
    }

    void read() {
        ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->shutdown();
                return;
            }
            self->handle(beast::buffers_to_string(self->in_.data()));
            self->in_.consume(self->in_.size());
            self->read();
        });
    }

    void error(const std::string& channel, std::uint64_t seq, std::string_view code, const std::string& message) {
        json body{{"kind", "ERR"}, {"channel", channel}, {"seq", seq}, {"stamp", 0},
                  {"payload", {{"code", code}, {"message", message}}}};
        direct_.push_back(body.dump(-1, ' ', false, json::error_handler_t::replace));
        pump();
    }

    void handle(const std::string& text) {
        if (text.size() > protocol::kMaxBody) {
            error("", 0, "frame_too_large", "frame exceeds 16 MiB");
            return;
        }
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded() || !value.is_object()) {
            // decode_body classifies the failure (depth, syntax) without another code path
            const auto r = protocol::decode_body(text);
            error("", 0, protocol::to_string(r.error), r.reason);
            return;
        }
        const auto ch = value.find("channel");
        std::string channel = ch != value.end() && ch->is_string() ? ch->get<std::string>() : std::string();
        Node* node = nullptr;
        const auto slash = channel.find('/');
        if (slash != std::string::npos) {
            if (Node* n = find(std::string_view(channel).substr(0, slash))) {
                node = n;
                value["channel"] = channel.substr(slash + 1);
            }
        }
        const std::string stripped = value.contains("channel") && value["channel"].is_string()
                                         ? value["channel"].get<std::string>()
                                         : std::string();
        if (!node && stripped == "fleet/info") {
            const auto r = protocol::decode_value(value);
            if (!r.ok()) {
                error(channel, r.seq, protocol::to_string(r.error), r.reason);
                return;
            }
            json payload = state_->fleet_info();
            payload["success"] = true;
            payload["message"] = "";
            json body{{"kind", "REP"}, {"channel", "fleet/info"}, {"seq", r.envelope->seq}, {"stamp", 0}, {"payload", payload}};
            direct_.push_back(body.dump());
            pump();
            return;
        }
        if (!node) node = default_;
        if (!node) {
            error(channel, 0, "unknown_channel", "prefix the channel with '<drone>/' or connect with ?drone=<name>");
            return;
        }
        const auto r = protocol::decode_value(value);
        if (!r.ok()) {
            error(channel, r.seq, protocol::to_string(r.error), r.reason);
            return;
        }
        node->post(std::move(*r.envelope), route(node).sink);
    }

    std::string render(const Route& r, const Frame& f) const {
        const Envelope& e = f.envelope;
        const std::string channel = r.node == default_ ? e.channel : r.node->name() + "/" + e.channel;
        json body{{"kind", protocol::to_string(e.kind)}, {"channel", channel}, {"seq", e.seq}, {"stamp", e.stamp},
                  {"payload", e.payload}};
        return body.dump();
    }

    void pump() {
        if (writing_ || closed_) return;
        std::string next;
        if (!direct_.empty()) {
            next = std::move(direct_.front());
            direct_.pop_front();
        } else {
            for (std::size_t k = 0; k < routes_.size() && next.empty(); ++k) {
                auto it = routes_.begin();
                std::advance(it, (cursor_ + k) % routes_.size());
                if (auto f = it->second.sink->outbox().try_pop()) {
                    next = render(it->second, **f);
                    cursor_ = (cursor_ + k + 1) % routes_.size();
                }
            }
        }
        if (next.empty()) return;
        writing_ = true;
        out_ = std::move(next);
        ws_.async_write(asio::buffer(out_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->writing_ = false;
            if (ec) {
                self->shutdown();
                return;
            }
            self->pump();
        });
    }

    void shutdown() override {
        if (closed_) return;
        closed_ = true;
        for (auto& [node, r] : routes_) {
            r.sink->outbox().close();
            node->detach(r.sink);
        }
        routes_.clear();
        beast::error_code ec;
        ws_.next_layer().close(ec);
    }

    websocket::stream<tcp::socket> ws_;
    std::shared_ptr<WsBridge::State> state_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> request_;
    beast::flat_buffer in_;
    std::map<Node*, Route> routes_;
    std::deque<std::string> direct_;
    std::string out_;
    std::size_t cursor_{0};
    Node* default_{nullptr};
    bool writing_{false};
    bool closed_{false};
};

void accept(const std::shared_ptr<WsBridge::State>& state) {
    state->acceptor.async_accept([state](beast::error_code ec, tcp::socket socket) {
        if (ec == asio::error::operation_aborted) return;
        if (!ec) {
            auto session = std::make_shared<WsSession>(std::move(socket), state);
            std::erase_if(state->sessions, [](const auto& w) { return w.expired(); });
            state->sessions.push_back(session);
            session->run();
        }
        accept(state);
    });
}

}  // namespace

WsBridge::WsBridge(const std::string& host, std::uint16_t port, std::vector<Node*> nodes,
                   std::function<json()> fleet_info)
    : state_(std::make_shared<State>()) {
    state_->nodes = std::move(nodes);
    state_->fleet_info = std::move(fleet_info);
    beast::error_code ec;
    const auto address = asio::ip::make_address(host.empty() ? "0.0.0.0" : host, ec);
    if (ec) throw std::runtime_error("websocket bridge: bad host " + host);
    const tcp::endpoint endpoint{address, port};
    state_->acceptor.open(endpoint.protocol(), ec);
    if (!ec) state_->acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) state_->acceptor.bind(endpoint, ec);
    if (!ec) state_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + ec.message());
    state_->port = state_->acceptor.local_endpoint().port();
}

WsBridge::~WsBridge() { stop(); }

void WsBridge::start() {
    accept(state_);
    thread_ = std::thread([state = state_] { state->io.run(); });
}

void WsBridge::stop() {
    if (!thread_.joinable()) return;
    asio::post(state_->io, [state = state_] {
        beast::error_code ec;
        state->acceptor.close(ec);
        for (auto& w : state->sessions) {
            if (auto s = w.lock()) s->shutdown();
        }
        state->sessions.clear();
    });
    thread_.join();
}

std::uint16_t WsBridge::port() const { return state_->port; }

}  // namespace anafi::simd
