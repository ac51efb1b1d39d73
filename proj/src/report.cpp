#include "abrsim/report.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace abrsim {

namespace {

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// First instant after which the series stays within 5% of its final
// mean; nullopt when even the last sample is outside.
std::optional<SimTime> settle_time(const TraceSeries& series, double mean) {
    const double band = 0.05 * std::max(std::abs(mean), 1e-9);
    if (series.empty()) return std::nullopt;
    int last_bad = -1;
    for (size_t i = 0; i < series.size(); ++i) {
        if (std::abs(series[i].value - mean) > band) {
            last_bad = static_cast<int>(i);
        }
    }
    if (last_bad < 0) return series.front().t_us;
    if (last_bad + 1 >= static_cast<int>(series.size())) return std::nullopt;
    return series[last_bad + 1].t_us;
}

}  // namespace

RunReport make_report(const Scenario& scenario, const SwitchConfig& cfg,
                      const TraceSet& traces) {
    RunReport r;
    r.vc_names = traces.vc_names;
    const SimTime t1 = traces.duration_us;
    const SimTime t0 = 0.75 * t1;

    for (size_t v = 0; v < traces.vc_names.size(); ++v) {
        const VcId id = static_cast<VcId>(v);
        r.steady_mean_acr.push_back(mean_between(traces.acr.at(id), t0, t1));
        r.steady_send_rate.push_back(emission_rate(traces, id, t0, t1));
    }

    // Bottleneck = busiest controlled port over the whole run.
    double best_util = -1.0;
    for (const auto& pid : traces.port_ids) {
        const double u = utilization(traces, pid, 0.0, t1);
        if (u > best_util) {
            best_util = u;
            r.bottleneck_port = pid;
        }
    }
    if (!r.bottleneck_port.empty()) {
        for (const auto& p : traces.queue_cells.at(r.bottleneck_port)) {
            r.max_queue_cells = std::max(r.max_queue_cells, p.value);
        }
        r.mean_utilization = utilization(traces, r.bottleneck_port, t0, t1);
    }

    // Convergence: every VC inside 5% of its final mean from here on.
    std::optional<SimTime> worst = 0.0;
    for (size_t v = 0; v < r.steady_mean_acr.size(); ++v) {
        auto t = settle_time(traces.acr.at(static_cast<VcId>(v)),
                             r.steady_mean_acr[v]);
        if (!t) {
            worst = std::nullopt;
            break;
        }
        if (worst && *t > *worst) worst = t;
    }
    r.convergence_time_us = worst;

    // The Jain index covers VCs that actually contend for the bottleneck
    // share: they cross the bottleneck port and are not pinned well below
    // its fair share by an application cap or an upstream link.
    std::vector<double> shares;
    r.in_equal_share_set.assign(traces.vc_names.size(), 0);
    if (!r.bottleneck_port.empty()) {
        const Rate capacity = abr_capacity_of(
            cfg, traces.port_rate.at(r.bottleneck_port), 0.0, 0.0);
        const double n = mean_between(traces.neff.at(r.bottleneck_port), t0, t1);
        const double fair_share = capacity / std::max(1.0, n);
        for (size_t v = 0; v < scenario.vcs.size(); ++v) {
            const auto& hops = scenario.vcs[v].route;
            bool crosses = false;
            for (size_t i = 0; i + 1 < hops.size(); ++i) {
                if (hops[i] + "->" + hops[i + 1] == r.bottleneck_port) {
                    crosses = true;
                    break;
                }
            }
            if (crosses && r.steady_mean_acr[v] >= 0.95 * fair_share) {
                r.in_equal_share_set[v] = 1;
                shares.push_back(r.steady_mean_acr[v]);
            }
        }
    }
    if (shares.size() > 1) {
        double sum = 0.0, sq = 0.0;
        for (double x : shares) {
            sum += x;
            sq += x * x;
        }
        r.jain_index = sum * sum / (shares.size() * sq);
    }
    return r;
}

std::string format_report(const RunReport& r, const Scenario& scenario,
                          const SwitchConfig& cfg) {
    std::ostringstream out;
    out << "scenario " << scenario.name << "\n";
    out << "variant " << to_string(cfg.variant) << "\n";
    out << "bottleneck " << r.bottleneck_port << "\n";
    out << "mean_utilization " << fixed(r.mean_utilization) << "\n";
    out << "max_queue_cells " << fixed(r.max_queue_cells, 0) << "\n";
    if (r.convergence_time_us) {
        out << "convergence_time_ms " << fixed(*r.convergence_time_us / 1000.0, 3)
            << "\n";
    } else {
        out << "convergence_time_ms not-converged\n";
    }
    out << "jain_index " << fixed(r.jain_index) << " over";
    bool any = false;
    for (size_t v = 0; v < r.vc_names.size(); ++v) {
        if (r.in_equal_share_set[v]) {
            out << " " << r.vc_names[v];
            any = true;
        }
    }
    if (!any) out << " (none)";
    out << "\n";
    for (size_t v = 0; v < r.vc_names.size(); ++v) {
        out << "vc " << r.vc_names[v] << " steady_acr_mbps "
            << fixed(r.steady_mean_acr[v]) << " send_rate_mbps "
            << fixed(r.steady_send_rate[v]) << "\n";
    }
    return out.str();
}

namespace {

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Walks a series once while sample times advance monotonically.
struct StepCursor {
    const TraceSeries* s = nullptr;
    size_t i = 0;
    double v = 0.0;

    double at(SimTime t) {
        while (i < s->size() && (*s)[i].t_us <= t) {
            v = (*s)[i].value;
            ++i;
        }
        return v;
    }
};

std::vector<SimTime> grid_times(const TraceSet& traces) {
    // Same accumulation the engine's grid-sample chain performs, so row
    // times land exactly on recorded sample times.
    std::vector<SimTime> ts{0.0};
    while (ts.back() + traces.grid_us <= traces.duration_us + 1e-9) {
        ts.push_back(ts.back() + traces.grid_us);
    }
    return ts;
}

}  // namespace

void write_csvs(const TraceSet& traces, const std::string& dir) {
    const std::vector<SimTime> ts = grid_times(traces);

    auto table = [&](const std::vector<std::string>& cols,
                     const std::vector<const TraceSeries*>& series,
                     int digits) {
        std::vector<StepCursor> cur;
        for (const auto* s : series) cur.push_back({s});
        std::ostringstream out;
        out << "time_ms";
        for (const auto& c : cols) out << "," << c;
        out << "\n";
        for (SimTime t : ts) {
            out << fixed(t / 1000.0, 3);
            for (auto& c : cur) out << "," << fixed(c.at(t), digits);
            out << "\n";
        }
        return out.str();
    };

    std::vector<const TraceSeries*> acr_series;
    for (size_t v = 0; v < traces.vc_names.size(); ++v) {
        acr_series.push_back(&traces.acr.at(static_cast<VcId>(v)));
    }
    write_file(dir + "/acr.csv", table(traces.vc_names, acr_series, 6));

    std::vector<const TraceSeries*> queue_series, neff_series, cum_series;
    for (const auto& pid : traces.port_ids) {
        queue_series.push_back(&traces.queue_cells.at(pid));
        neff_series.push_back(&traces.neff.at(pid));
        cum_series.push_back(&traces.cum_cells_out.at(pid));
    }
    write_file(dir + "/queue.csv", table(traces.port_ids, queue_series, 0));
    write_file(dir + "/neff.csv", table(traces.port_ids, neff_series, 6));

    // Utilization per grid window, from cumulative transmit counts.
    std::vector<StepCursor> cum;
    for (const auto* s : cum_series) cum.push_back({s});
    std::vector<double> prev(cum_series.size(), 0.0);
    std::ostringstream util;
    util << "time_ms";
    for (const auto& pid : traces.port_ids) util << "," << pid;
    util << "\n";
    for (size_t i = 0; i < ts.size(); ++i) {
        util << fixed(ts[i] / 1000.0, 3);
        for (size_t p = 0; p < cum.size(); ++p) {
            const double cells = cum[p].at(ts[i]);
            double u = 0.0;
            if (i > 0) {
                u = (cells - prev[p]) * kCellBits /
                    ((ts[i] - ts[i - 1]) *
                     traces.port_rate.at(traces.port_ids[p]));
            }
            prev[p] = cells;
            util << "," << fixed(u);
        }
        util << "\n";
    }
    write_file(dir + "/util.csv", util.str());
}

}  // namespace abrsim
