// Ground-station command line: fleet discovery, flight commands, parameters,
// media download, experiments and keyboard teleoperation.
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "anafi/gcs/client.hpp"
#include "anafi/gcs/experiment.hpp"
#include "anafi/gcs/teleop.hpp"
#include "anafi/protocol/schema.hpp"

using namespace anafi;
using namespace anafi::gcs;
using nlohmann::json;

namespace {

struct Target {
    std::string host{"127.0.0.1"};
    int fleet_port{9089};
};

/// `name`, or `host:port` to skip discovery.
std::unique_ptr<DroneClient> connect(const Target& t, const std::string& drone) {
    const auto colon = drone.rfind(':');
    if (colon != std::string::npos) {
        const int port = std::stoi(drone.substr(colon + 1));
        auto c = std::make_unique<DroneClient>(drone.substr(0, colon), static_cast<std::uint16_t>(port));
        c->hello();
        return c;
    }
    const json drones = fleet_info(t.host, static_cast<std::uint16_t>(t.fleet_port));
    for (const auto& d : drones) {
        if (d["name"] == drone) {
            auto c = std::make_unique<DroneClient>(t.host, d["port"].get<std::uint16_t>());
            c->hello();
            return c;
        }
    }
    throw std::runtime_error("no drone named '" + drone + "' in the fleet");
}

json parse_value(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    if (v.is_discarded() || !(v.is_boolean() || v.is_number() || v.is_string())) return text;
    return v;
}

std::string extension(const std::string& format) {
    if (format == "mp4") return ".mp4";
    if (format == "dng") return ".dng";
    return ".jpg";
}

std::filesystem::path default_media_dir() {
    const char* home = std::getenv("HOME");
    return std::filesystem::path(home ? home : ".") / "Pictures" / "Anafi";
}

void print_summary(const ExperimentResult& r) {
    const auto& s = r.samples;
    std::fprintf(stderr, "%s on %s: %zu rows over %.2f s\n", r.name.c_str(), r.model.c_str(), s.size(),
                 s.empty() ? 0.0 : s.back().t);
    switch (r.signal) {
    case Signal::Pitch:
    case Signal::Roll:
        std::fprintf(stderr, "  peak horizontal speed %.2f m/s\n", peak_horizontal_speed(s));
        break;
    case Signal::Vertical:
        if (auto d = first_crossing(s, &Sample::vz, 0.05 * std::abs(r.segments.front().value))) {
            std::fprintf(stderr, "  delay %.0f ms\n", *d * 1000.0);
        }
        break;
    case Signal::Yaw: {
        double peak = 0;
        for (const auto& x : s) peak = std::max(peak, std::abs(x.yaw));
        std::fprintf(stderr, "  peak yaw excursion %.1f deg\n", peak);
        break;
    }
    case Signal::Gimbal: {
        double from = 0;
        for (const auto& seg : r.segments) {
            const auto st = settling_time(r.gimbal, seg.value, 1.0, from, from + seg.duration);
            if (st) std::fprintf(stderr, "  step to %.1f deg settled in %.3f s\n", seg.value, *st);
            from += seg.duration;
        }
        break;
    }
    }
}

class RawTerminal {
public:
    RawTerminal() {
        if (!isatty(STDIN_FILENO)) throw std::runtime_error("teleop needs an interactive terminal");
        tcgetattr(STDIN_FILENO, &saved_);
        termios raw = saved_;
        raw.c_lflag &= static_cast<tcflag_t>(~(ICANON | ECHO | ISIG));
        raw.c_cc[VMIN] = 0;
        raw.c_cc[VTIME] = 0;
        tcsetattr(STDIN_FILENO, TCSANOW, &raw);
    }
    ~RawTerminal() { tcsetattr(STDIN_FILENO, TCSANOW, &saved_); }

private:
    termios saved_{};
};

int teleop(DroneClient& c, int magnitude) {
    c.call("skycontroller/offboard", {{"data", false}});
    std::string state = "?";
    std::mutex m;
    c.subscribe("drone/state", [&](const protocol::Envelope& e) {
        std::lock_guard lock(m);
        state = e.payload["data"].get<std::string>();
    });
    auto report = [](const protocol::Envelope& e) {
        if (e.kind == protocol::Kind::Err || !e.payload.value("success", false)) {
            std::fprintf(stderr, "\r\n%s: %s\r\n", e.channel.c_str(), e.payload.value("message", std::string()).c_str());
        }
    };
    auto service = [&](const char* name) {
        c.request_async({protocol::Kind::Req, name, 0, 0, json::object()}, report);
    };
    std::fprintf(stderr,
                 "WASD pitch/roll, arrows climb/yaw, g/h gimbal, t takeoff, l land, space halt, q quit\r\n");
    RawTerminal raw;
    TeleopMapper mapper(magnitude);
    std::string pending;
    auto next = TeleopMapper::Clock::now();
    while (c.connected()) {
        pollfd p{STDIN_FILENO, POLLIN, 0};
        const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(next - TeleopMapper::Clock::now());
        if (::poll(&p, 1, static_cast<int>(std::max<long long>(0, wait.count()))) > 0) {
            char buf[64];
            const auto n = ::read(STDIN_FILENO, buf, sizeof buf);
            if (n > 0) pending.append(buf, static_cast<std::size_t>(n));
            const auto now = TeleopMapper::Clock::now();
            for (Key k : decode_keys(pending)) {
                switch (mapper.press(k, now)) {
                case TeleopMapper::Action::Takeoff: service("drone/takeoff"); break;
                case TeleopMapper::Action::Land: service("drone/land"); break;
                case TeleopMapper::Action::Halt: service("drone/halt"); break;
                case TeleopMapper::Action::Quit:
                    c.publish("skycontroller/command", mapper.command(now));
                    std::fprintf(stderr, "\r\n");
                    return 0;
                case TeleopMapper::Action::None: break;
                }
            }
        }
        const auto now = TeleopMapper::Clock::now();
        if (now >= next) {
            const json cmd = mapper.command(now);
            c.publish("skycontroller/command", cmd);
            std::lock_guard lock(m);
            std::fprintf(stderr, "\r%-10s x %4d y %4d z %4d yaw %4d cam %4d ", state.c_str(), cmd["x"].get<int>(),
                         cmd["y"].get<int>(), cmd["z"].get<int>(), cmd["yaw"].get<int>(), cmd["camera"].get<int>());
            next += TeleopMapper::kPublishPeriod;
            if (next < now) next = now + TeleopMapper::kPublishPeriod;
        }
    }
    std::fprintf(stderr, "\r\nconnection lost\r\n");
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground station for simulated ANAFI drones"};
    app.require_subcommand(1);
    Target target;
    app.add_option("--host", target.host, "daemon address")->capture_default_str();
    app.add_option("--fleet-port", target.fleet_port, "fleet info port")->capture_default_str();

    auto* list = app.add_subcommand("list", "list the drones of the fleet");

    std::string drone;
    std::string action;
    auto* fly = app.add_subcommand("fly", "flight command");
    fly->add_option("drone", drone, "drone name or host:port")->required();
    fly->add_option("action", action, "takeoff, land, rth, halt or emergency")
        ->required()
        ->check(CLI::IsMember({"takeoff", "land", "rth", "halt", "emergency"}));

    std::vector<double> by, to;
    int orientation = 0;
    auto* move = app.add_subcommand("move", "relative or absolute move");
    move->add_option("drone", drone, "drone name or host:port")->required();
    auto* by_opt = move->add_option("--by", by, "dx dy dz dyaw (m, m, m, deg)")->expected(4);
    auto* to_opt = move->add_option("--to", to, "latitude longitude altitude heading")->expected(4);
    move->add_option("--orientation-mode", orientation, "0 none, 1 to target, 2 heading start, 3 heading during")
        ->check(CLI::Range(0, 3));
    by_opt->excludes(to_opt);
    to_opt->excludes(by_opt);

    std::string name, value;
    auto* param = app.add_subcommand("param", "read or write a parameter");
    param->require_subcommand(1);
    auto* pget = param->add_subcommand("get", "read a parameter");
    pget->add_option("drone", drone)->required();
    pget->add_option("name", name)->required();
    auto* pset = param->add_subcommand("set", "write a parameter and print the stored value");
    pset->add_option("drone", drone)->required();
    pset->add_option("name", name)->required();
    pset->add_option("value", value)->required();

    bool remove = false;
    std::string dir = default_media_dir().string();
    auto* media = app.add_subcommand("media", "media storage");
    media->require_subcommand(1);
    auto* download = media->add_subcommand("download", "download every media file");
    download->add_option("drone", drone)->required();
    download->add_flag("--delete", remove, "delete from the drone after download");
    download->add_option("--dir", dir, "download folder")->capture_default_str();

    std::string spec_path, out_path;
    std::vector<std::string> spec_paths;
    auto* experiment = app.add_subcommand("experiment", "run a step-response experiment and write CSV");
    experiment->add_option("spec", spec_path, "experiment spec (JSON)")->required()->check(CLI::ExistingFile);
    experiment->add_option("--drone", drone, "drone name or host:port (default: first drone)");
    experiment->add_option("--out", out_path, "CSV output (default: stdout)");

    int magnitude = 50;
    auto* tele = app.add_subcommand("teleop", "keyboard piloting");
    tele->add_option("drone", drone)->required();
    tele->add_option("--magnitude", magnitude, "stick deflection per key, percent")->check(CLI::Range(1, 100));

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& d : fleet_info(target.host, static_cast<std::uint16_t>(target.fleet_port))) {
                std::printf("%-16s %-8s %u\n", d["name"].get<std::string>().c_str(),
                            d["model"].get<std::string>().c_str(), d["port"].get<unsigned>());
            }
        } else if (fly->parsed()) {
            auto c = connect(target, drone);
            const json rep = c->call("drone/" + action);
            std::printf("%s\n", rep.value("message", std::string("ok")).c_str());
        } else if (move->parsed()) {
            if (by.empty() && to.empty()) throw CLI::RequiredError("--by or --to");
            auto c = connect(target, drone);
            if (!by.empty()) {
                c->publish("drone/moveby", {{"dx", by[0]}, {"dy", by[1]}, {"dz", by[2]}, {"dyaw", by[3]}});
            } else {
                c->publish("drone/moveto", {{"latitude", to[0]},
                                            {"longitude", to[1]},
                                            {"altitude", to[2]},
                                            {"heading", to[3]},
                                            {"orientation_mode", orientation}});
            }
            // a rejected move comes back as an error notice
            std::promise<std::string> error;
            auto f = error.get_future();
            c->on_notice([&](const protocol::Envelope& e) {
                if (e.channel != "drone/moveby" && e.channel != "drone/moveto") return;
                const std::string code = e.payload.value("code", std::string());
                if (code != "geofence" && code != "clamped" && code != "done") {
                    try {
                        error.set_value(e.payload.value("message", code));
                    } catch (const std::future_error&) {
                    }
                } else {
                    std::fprintf(stderr, "%s\n", e.payload.value("message", std::string()).c_str());
                }
            });
            c->param_get("drone/max_altitude");  // round trip: the move has been applied
            if (f.wait_for(std::chrono::milliseconds(200)) == std::future_status::ready) {
                throw RemoteError("rejected", f.get());
            }
            c->on_notice({});
            std::printf("move accepted\n");
        } else if (pget->parsed()) {
            auto c = connect(target, drone);
            std::printf("%s\n", c->param_get(name).dump().c_str());
        } else if (pset->parsed()) {
            auto c = connect(target, drone);
            std::printf("%s\n", c->param_set(name, parse_value(value)).dump().c_str());
        } else if (download->parsed()) {
            auto c = connect(target, drone);
            std::filesystem::create_directories(dir);
            std::size_t total = 0;
            while (true) {
                const json rep = c->call("storage/download", {{"data", remove}}, std::chrono::seconds(10));
                for (const auto& f : rep.value("files", json::array())) {
                    const auto path =
                        std::filesystem::path(dir) / (f["media_id"].get<std::string>() + extension(f["format"]));
                    std::ofstream out(path, std::ios::binary);
                    const auto bytes = protocol::base64_decode(f["data"].get<std::string>());
                    if (!bytes) throw ProtocolError("malformed", "bad media payload");
                    out.write(bytes->data(), static_cast<std::streamsize>(bytes->size()));
                    if (!out) throw std::runtime_error("cannot write " + path.string());
                    std::printf("%s\n", path.string().c_str());
                    ++total;
                }
                const auto remaining = rep.value("remaining", 0ull);
                if (remaining == 0) break;
                if (!remove) {
                    std::fprintf(stderr, "%llu more files; rerun with --delete to page through them\n", remaining);
                    break;
                }
            }
            std::fprintf(stderr, "%zu files in %s\n", total, dir.c_str());
        } else if (experiment->parsed()) {
            const ExperimentSpec spec = load_experiment_spec(spec_path);
            if (drone.empty()) {
                const json drones = fleet_info(target.host, static_cast<std::uint16_t>(target.fleet_port));
                if (drones.empty()) throw std::runtime_error("fleet is empty");
                drone = drones[0]["name"];
            }
            auto c = connect(target, drone);
            RunOptions opt;
            opt.log = [](const std::string& m) { std::fprintf(stderr, "%s\n", m.c_str()); };
            const ExperimentResult r = run_experiment(*c, spec, opt);
            if (out_path.empty()) {
                r.write_csv(std::cout);
            } else {
                std::ofstream out(out_path);
                r.write_csv(out);
                if (!out) throw std::runtime_error("cannot write " + out_path);
            }
            print_summary(r);
        } else if (tele->parsed()) {
            auto c = connect(target, drone);
            return teleop(*c, magnitude);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gcs: %s\n", e.what());
        return 1;
    }
    return 0;
}
