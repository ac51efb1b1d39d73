#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abrsim/engine.h"

// Post-run summary plus the CSV trace files. CSVs are wide tables on the
// trace grid: first column time_ms, one column per VC or controlled
// port, '.' decimal separator. Identical runs write identical bytes.

namespace abrsim {

struct RunReport {
    std::vector<std::string> vc_names;
    std::vector<Rate> steady_mean_acr;      // time-weighted, last 25% of run
    std::vector<Rate> steady_send_rate;     // from emitted-cell counts
    std::vector<char> in_equal_share_set;   // VCs the Jain index covers
    std::optional<SimTime> convergence_time_us;
    double jain_index = 1.0;
    std::string bottleneck_port;            // highest mean utilization
    double max_queue_cells = 0.0;           // bottleneck, whole run
    double mean_utilization = 0.0;          // bottleneck, last 25%
};

RunReport make_report(const Scenario& scenario, const SwitchConfig& cfg,
                      const TraceSet& traces);

std::string format_report(const RunReport& report, const Scenario& scenario,
                          const SwitchConfig& cfg);

// Writes acr.csv, queue.csv, neff.csv and util.csv into dir (which must
// exist). Throws std::runtime_error when a file cannot be written.
void write_csvs(const TraceSet& traces, const std::string& dir);

}  // namespace abrsim
