#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "abrsim/engine.h"
#include "abrsim/maxmin.h"
#include "abrsim/report.h"
#include "abrsim/scenario.h"

// Exit codes: 0 ok, 2 usage/validation error, 3 I/O error.

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

double parse_duration_us(const std::string& text) {
    std::string num = text;
    double scale = 1000.0;  // bare numbers are milliseconds
    if (num.ends_with("ms")) {
        num.resize(num.size() - 2);
        scale = 1000.0;
    } else if (num.ends_with("us")) {
        num.resize(num.size() - 2);
        scale = 1.0;
    } else if (num.ends_with("s")) {
        num.resize(num.size() - 1);
        scale = 1e6;
    }
    size_t pos = 0;
    const double v = std::stod(num, &pos);
    if (pos != num.size() || !(v > 0.0)) {
        throw abrsim::ConfigError("bad duration: " + text);
    }
    return v * scale;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

struct ScenarioArgs {
    std::string name;
    std::string file;

    abrsim::Scenario load() const {
        if (!file.empty()) return abrsim::parse_scenario(read_file(file));
        if (name == "three-source") return abrsim::build_three_source();
        if (name == "upstream") return abrsim::build_upstream();
        if (name == "two-source-transient") {
            return abrsim::build_two_source_transient();
        }
        throw abrsim::ConfigError("unknown scenario: " + name);
    }
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& args) {
    auto* name = cmd->add_option(
        "--scenario", args.name,
        "built-in scenario: three-source, upstream, two-source-transient");
    auto* file = cmd->add_option("--file", args.file, "scenario file path");
    name->excludes(file);
}

struct SwitchArgs {
    std::string variant = "neff-measured";
    double target_util = 0.9;
    double delta = 0.1;
    int interval_cells = 100;
    std::string interval_max = "1ms";
    double capacity_override = 0.0;

    abrsim::SwitchConfig config() const {
        abrsim::SwitchConfig cfg;
        auto v = abrsim::variant_from_string(variant);
        if (!v) throw abrsim::ConfigError("unknown variant: " + variant);
        cfg.variant = *v;
        cfg.target_utilization = target_util;
        cfg.delta = delta;
        cfg.interval_cells = interval_cells;
        cfg.interval_max_us = parse_duration_us(interval_max);
        if (capacity_override > 0.0) cfg.capacity_override = capacity_override;
        abrsim::validate_config(cfg);
        return cfg;
    }
};

void add_switch_flags(CLI::App* cmd, SwitchArgs& args) {
    cmd->add_option("--variant", args.variant,
                    "erica-basic | erica-fair | neff-ccr | neff-measured");
    cmd->add_option("--target-util", args.target_util,
                    "target utilization (default 0.9)");
    cmd->add_option("--delta", args.delta,
                    "erica-fair unity band (default 0.1)");
    cmd->add_option("--interval-cells", args.interval_cells,
                    "cells per measurement interval (default 100)");
    cmd->add_option("--interval-max", args.interval_max,
                    "max measurement interval (default 1ms)");
    cmd->add_option("--capacity-override", args.capacity_override,
                    "fixed ABR capacity in Mbps instead of util * link rate");
}

int cmd_run(const ScenarioArgs& sargs, const SwitchArgs& swargs,
            const std::string& duration, int nrm, const std::string& out_dir) {
    abrsim::Scenario scenario = sargs.load();
    if (nrm > 0) scenario.default_nrm = nrm;
    const abrsim::SwitchConfig cfg = swargs.config();
    const double duration_us = parse_duration_us(duration);

    const abrsim::TraceSet traces = abrsim::run(scenario, cfg, duration_us);
    const abrsim::RunReport report = abrsim::make_report(scenario, cfg, traces);
    const std::string text = abrsim::format_report(report, scenario, cfg);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "cannot create " << out_dir << ": " << ec.message()
                  << "\n";
        return kExitIo;
    }
    try {
        abrsim::write_csvs(traces, out_dir);
        std::ofstream rep(out_dir + "/report", std::ios::binary);
        if (!rep) throw std::runtime_error("cannot write report");
        rep << text;
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    }
    std::cout << text;
    return 0;
}

int cmd_validate(const std::string& file) {
    abrsim::Scenario s = abrsim::parse_scenario(read_file(file));
    std::cout << "ok: " << s.name << " (" << s.nodes.size() << " nodes, "
              << s.links.size() << " links, " << s.vcs.size() << " vcs)\n";
    return 0;
}

int cmd_oracle(const ScenarioArgs& sargs, const SwitchArgs& swargs) {
    const abrsim::Scenario scenario = sargs.load();
    const abrsim::SwitchConfig cfg = swargs.config();
    const abrsim::NetworkModel net = abrsim::to_network_model(scenario, cfg);
    const std::vector<abrsim::Rate> caps = abrsim::demand_caps(scenario);
    std::map<abrsim::VcId, abrsim::Rate> cap_map;
    for (size_t i = 0; i < caps.size(); ++i) {
        cap_map[static_cast<abrsim::VcId>(i)] = caps[i];
    }
    const auto alloc = abrsim::maxmin_allocate(net, cap_map);
    for (size_t i = 0; i < scenario.vcs.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f",
                      alloc.at(static_cast<abrsim::VcId>(i)));
        std::cout << scenario.vcs[i].name << " " << buf << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ATM ABR explicit-rate feedback simulator"};
    app.require_subcommand(1);

    ScenarioArgs run_scenario, oracle_scenario;
    SwitchArgs run_switch, oracle_switch;
    std::string duration = "400ms";
    std::string out_dir = "out";
    std::string validate_file;
    int nrm = 0;

    CLI::App* run = app.add_subcommand("run", "simulate and write traces");
    add_scenario_flags(run, run_scenario);
    add_switch_flags(run, run_switch);
    run->add_option("--duration", duration, "simulated time (default 400ms)");
    run->add_option("--nrm", nrm, "cells per forward RM cell (default 32)");
    run->add_option("--out", out_dir, "output directory (default out)");

    CLI::App* validate =
        app.add_subcommand("validate", "check a scenario file");
    validate->add_option("--file", validate_file, "scenario file path")
        ->required();

    CLI::App* oracle = app.add_subcommand(
        "oracle", "print the max-min allocation for a scenario");
    add_scenario_flags(oracle, oracle_scenario);
    add_switch_flags(oracle, oracle_switch);

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            return cmd_run(run_scenario, run_switch, duration, nrm, out_dir);
        }
        if (validate->parsed()) return cmd_validate(validate_file);
        if (oracle->parsed()) return cmd_oracle(oracle_scenario, oracle_switch);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const abrsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
