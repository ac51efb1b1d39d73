#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abrsim/core.h"

// Per-output-port ABR rate allocation. Four variants share one state
// block and one interval loop:
//   erica-basic    max(FairShare, CCR/rho) with the one-cell-seen VC count
//   erica-fair     erica-basic plus the MaxAllocPrevious equalization step
//                  applied while rho <= 1 + delta
//   neff-ccr       FairShare = capacity / effective VC count, activity from
//                  the CCR field of forward RM cells
//   neff-measured  same, but per-VC rates measured from cell counts instead
//                  of trusting the CCR field

namespace abrsim {

enum class SwitchVariant { EricaBasic, EricaFair, NeffCcr, NeffMeasured };

const char* to_string(SwitchVariant v);
std::optional<SwitchVariant> variant_from_string(const std::string& s);

struct SwitchConfig {
    SwitchVariant variant = SwitchVariant::NeffMeasured;
    double target_utilization = 0.9;
    double delta = 0.1;          // unity band for the erica-fair step
    int interval_cells = 100;    // interval ends on this many cells...
    SimTime interval_max_us = 1000.0;  // ...or this much time, whichever first
    double rho_floor = 0.01;     // keeps CCR/rho finite on an idle link
    std::optional<Rate> capacity_override;  // use instead of util * link rate
    bool first_cell_guard = true;  // hold n_last until every set-up VC is seen
    double rate_smoothing = 0.0;   // EWMA weight on old measured rate, 0 = off
};

void validate_config(const SwitchConfig& cfg);  // throws ConfigError

struct PortControl {
    Rate abr_capacity = 0.0;
    long input_cell_count = 0;
    std::map<VcId, long> per_vc_cell_count;
    double rho = 1.0;
    Rate fair_share = 0.0;
    double n_last = 1.0;   // never drops below 1
    double n_current = 0.0;
    std::map<VcId, double> activity;
    std::map<VcId, Rate> ccr;
    std::map<VcId, bool> first_cell_seen;
    int vcs_seen = 0;
    Rate max_alloc_previous = 0.0;
    Rate max_alloc_current = 0.0;
    Rate vbr_usage = 0.0;  // no higher-priority traffic in these scenarios
    Rate cbr_usage = 0.0;
    SimTime interval_start = 0.0;
};

Rate abr_capacity_of(const SwitchConfig& cfg, Rate link_rate, Rate vbr,
                     Rate cbr);

PortControl make_port_control(std::span<const VcId> vcs,
                              const SwitchConfig& cfg, Rate link_rate,
                              SimTime now);

// A data or forward-RM cell was received for this port's direction.
void on_data_or_frm_cell(PortControl& port, const SwitchConfig& cfg,
                         const Cell& cell);

// End of the measurement interval. Returns false (and changes nothing)
// for a degenerate zero-length interval.
bool end_interval(PortControl& port, const SwitchConfig& cfg, Rate link_rate,
                  SimTime now);

// The ER this port currently grants the VC. Non-const: erica-fair records
// the allocations it hands out.
Rate compute_er(PortControl& port, const SwitchConfig& cfg, VcId vc);

struct FeedbackDecision {
    Rate er_out = 0.0;       // written into the BRM
    Rate er_computed = 0.0;  // this port's grant before min with the cell
};

// Stamp a BRM about to be forwarded in the reverse direction.
FeedbackDecision on_brm_cell(PortControl& port, const SwitchConfig& cfg,
                             RmPayload& rm, VcId vc);

}  // namespace abrsim
