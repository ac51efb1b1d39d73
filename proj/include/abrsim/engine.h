#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abrsim/scenario.h"
#include "abrsim/switch.h"

// Deterministic event loop: store-and-forward FIFO ports on every
// directed link, ABR rate control on switch output ports in the forward
// direction, BRMs stamped hop by hop on the reverse path. Two runs of
// the same scenario produce identical traces.

namespace abrsim {

struct TracePoint {
    SimTime t_us = 0.0;
    double value = 0.0;
    bool operator==(const TracePoint&) const = default;
};

using TraceSeries = std::vector<TracePoint>;

struct PortStats {
    long long cells_in = 0;
    long long cells_out = 0;
    long long queued_at_end = 0;
    bool operator==(const PortStats&) const = default;
};

struct TraceSet {
    SimTime duration_us = 0.0;
    SimTime grid_us = 100.0;
    std::vector<std::string> vc_names;       // index = VcId
    std::vector<std::string> port_ids;       // controlled ports only
    std::map<std::string, Rate> port_rate;   // controlled ports, Mbps

    std::map<VcId, TraceSeries> acr;                  // on every change
    std::map<VcId, TraceSeries> cum_cells_emitted;    // sampled on the grid
    std::map<std::string, TraceSeries> queue_cells;   // grid + interval ends
    std::map<std::string, TraceSeries> neff;          // count dividing capacity
    std::map<std::string, TraceSeries> util;          // windowed, per sample
    std::map<std::string, TraceSeries> cum_cells_out; // cumulative transmitted

    std::map<std::string, PortStats> port_stats;      // every port
};

// Step interpolation: last recorded value at or before t (0 before the
// first sample).
double value_at(const TraceSeries& series, SimTime t);

// Time-weighted mean of the step function over [from, to].
double mean_between(const TraceSeries& series, SimTime from, SimTime to);

// Cells transmitted * 424 / (window * link rate), from the cumulative
// transmit counts of a controlled port.
double utilization(const TraceSet& traces, const std::string& port,
                   SimTime from, SimTime to);

// Mean sending rate of a VC over [from, to], from emitted-cell counts.
double emission_rate(const TraceSet& traces, VcId vc, SimTime from,
                     SimTime to);

struct BrmStampEvent {
    VcId vc = 0;
    std::uint64_t seq = 0;
    std::string port;
    Rate er_computed = 0.0;
    Rate er_after = 0.0;
    SimTime t_us = 0.0;
};

struct RunOptions {
    SimTime trace_grid_us = 100.0;
    std::function<void(const BrmStampEvent&)> brm_audit;  // test hook
};

TraceSet run(const Scenario& scenario, const SwitchConfig& cfg,
             SimTime duration_us, const RunOptions& opts = {});

}  // namespace abrsim
