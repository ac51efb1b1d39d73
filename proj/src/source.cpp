#include "abrsim/source.h"

#include <algorithm>
#include <cassert>

namespace abrsim {

Rate sending_rate(const SourceState& s) {
    return std::min(s.acr, s.app_cap);
}

bool in_active_window(const SourceState& s, SimTime now) {
    for (const auto& w : s.windows) {
        if (now >= w.start_us && now < w.stop_us) return true;
    }
    return false;
}

Cell emit_next(SourceState& s, SimTime now) {
    if (!in_active_window(s, now)) {
        throw std::logic_error("emit_next called outside an active window");
    }
    Cell c;
    c.vc = s.vc;
    c.emitted_at = now;
    c.seq = s.next_seq++;
    if (s.cells_since_rm + 1 >= s.nrm) {
        c.kind = CellKind::ForwardRm;
        c.rm = RmPayload{s.acr, s.pcr, false, false};
        s.cells_since_rm = 0;
    } else {
        c.kind = CellKind::Data;
        ++s.cells_since_rm;
    }
    const Rate rate = sending_rate(s);
    assert(rate > 0.0);
    s.next_emit_us = now + kCellBits / rate;
    return c;
}

void on_brm(SourceState& s, const RmPayload& rm) {
    // RIF = 1: increases are not rate-limited and decreases are immediate.
    s.acr = std::min(rm.er, s.pcr);
}

Cell turn_around(const Cell& frm) {
    if (frm.kind != CellKind::ForwardRm) {
        throw std::logic_error("turn_around expects a forward RM cell");
    }
    Cell brm = frm;
    brm.kind = CellKind::BackwardRm;
    return brm;
}

}  // namespace abrsim
