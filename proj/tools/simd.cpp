// Simulator daemon: serves a fleet of simulated drones until interrupted.
#include <csignal>
#include <cstdio>
#include <iostream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "anafi/simd/config.hpp"
#include "anafi/simd/daemon.hpp"

using namespace anafi;

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

simd::FleetConfig default_fleet() {
    simd::FleetConfig c;
    c.drones.push_back({"anafi", DroneModel::Anafi4k, {48.8784, 2.3677, 0.0}, 0.0, std::nullopt});
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulated ANAFI fleet daemon"};
    std::string config_path;
    std::optional<int> base_port, ws_port, tick_rate;
    std::optional<double> factor;
    std::optional<std::string> log_level, host;
    app.add_option("-c,--config", config_path, "fleet configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--base-port", base_port, "port of the first drone; fleet info listens one below (0: ephemeral)")
        ->check(CLI::Range(0, 65535));
    app.add_option("--realtime-factor", factor, "simulation speed; 0 runs as fast as clients allow")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--tick-rate", tick_rate, "physics rate in Hz")->check(CLI::Range(100, 1000));
    app.add_option("--ws-port", ws_port, "enable the WebSocket bridge on this port")->check(CLI::Range(0, 65535));
    app.add_option("--host", host, "listen address");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error");
    CLI11_PARSE(app, argc, argv);

    simd::FleetConfig config;
    try {
        config = config_path.empty() ? default_fleet() : simd::load_fleet_config(config_path);
        simd::apply_environment(config);
        if (base_port) config.base_port = static_cast<std::uint16_t>(*base_port);
        if (factor) config.realtime_factor = *factor;
        if (tick_rate) config.tick_rate = *tick_rate;
        if (ws_port) config.ws_port = static_cast<std::uint16_t>(*ws_port);
        if (host) config.host = *host;
        if (log_level) config.log_level = *log_level;
        spdlog::set_level(spdlog::level::from_str(config.log_level));
    } catch (const std::exception& e) {
        std::cerr << "simd: " << e.what() << "\n";
        return 2;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    try {
        simd::Daemon daemon(config);
        daemon.start();
        for (std::size_t i = 0; i < daemon.size(); ++i) {
            std::printf("%s %s %u\n", daemon.node(i).name().c_str(), std::string(to_string(daemon.node(i).model())).c_str(),
                        daemon.port(i));
        }
        std::printf("fleet %u\n", daemon.fleet_port());
        if (auto ws = daemon.ws_port()) std::printf("ws %u\n", *ws);
        std::fflush(stdout);
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        spdlog::info("shutting down");
        daemon.stop();
    } catch (const std::exception& e) {
        std::cerr << "simd: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
