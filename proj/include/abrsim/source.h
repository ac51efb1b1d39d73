#pragma once

#include <vector>

#include "abrsim/core.h"

// ABR endpoint behavior: paced emission with in-band forward RM cells,
// immediate ACR adoption on backward RM receipt (RIF = 1), and the
// destination turnaround.

namespace abrsim {

struct ActiveWindow {
    SimTime start_us = 0.0;
    SimTime stop_us = kNoStop;  // exclusive
};

struct SourceState {
    VcId vc = 0;
    Rate acr = 0.0;
    Rate icr = 0.0;
    Rate pcr = kOc3Mbps;
    Rate app_cap = kUnboundedRate;  // the application may not fill the ACR
    double rif = 1.0;               // fixed: jump straight to the ER
    int nrm = 32;                   // every nrm-th in-rate cell is an FRM
    int cells_since_rm = 0;
    std::vector<ActiveWindow> windows;
    SimTime next_emit_us = 0.0;
    std::uint64_t next_seq = 0;
};

// What the source actually puts on the wire: min(acr, app_cap).
Rate sending_rate(const SourceState& s);

bool in_active_window(const SourceState& s, SimTime now);

// Emit one cell and advance the pacing clock. The cell is an FRM when the
// nrm counter wraps, carrying ccr = acr and er = pcr. Must be called
// inside an active window.
Cell emit_next(SourceState& s, SimTime now);

// BRM received: adopt min(er, pcr). CI/NI are never set here.
void on_brm(SourceState& s, const RmPayload& rm);

// Destination behavior: reflect an FRM as a BRM, payload untouched,
// zero turnaround delay.
Cell turn_around(const Cell& frm);

}  // namespace abrsim
