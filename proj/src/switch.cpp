#include "abrsim/switch.h"

#include <algorithm>
#include <cassert>

namespace abrsim {

const char* to_string(SwitchVariant v) {
    switch (v) {
    case SwitchVariant::EricaBasic: return "erica-basic";
    case SwitchVariant::EricaFair: return "erica-fair";
    case SwitchVariant::NeffCcr: return "neff-ccr";
    case SwitchVariant::NeffMeasured: return "neff-measured";
    }
    return "?";
}

std::optional<SwitchVariant> variant_from_string(const std::string& s) {
    if (s == "erica-basic") return SwitchVariant::EricaBasic;
    if (s == "erica-fair") return SwitchVariant::EricaFair;
    if (s == "neff-ccr") return SwitchVariant::NeffCcr;
    if (s == "neff-measured") return SwitchVariant::NeffMeasured;
    return std::nullopt;
}

void validate_config(const SwitchConfig& cfg) {
    if (!(cfg.target_utilization > 0.0) || cfg.target_utilization > 1.0) {
        throw ConfigError("target utilization must be in (0, 1]");
    }
    if (cfg.delta < 0.0) throw ConfigError("delta must be >= 0");
    if (cfg.interval_cells < 1) throw ConfigError("interval cells must be >= 1");
    if (!(cfg.interval_max_us > 0.0)) {
        throw ConfigError("interval max must be positive");
    }
    if (!(cfg.rho_floor > 0.0)) throw ConfigError("rho floor must be positive");
    if (cfg.capacity_override && !(*cfg.capacity_override > 0.0)) {
        throw ConfigError("capacity override must be positive");
    }
    if (cfg.rate_smoothing < 0.0 || cfg.rate_smoothing >= 1.0) {
        throw ConfigError("rate smoothing must be in [0, 1)");
    }
}

Rate abr_capacity_of(const SwitchConfig& cfg, Rate link_rate, Rate vbr,
                     Rate cbr) {
    if (cfg.capacity_override) return *cfg.capacity_override;
    return cfg.target_utilization * link_rate - vbr - cbr;
}

PortControl make_port_control(std::span<const VcId> vcs,
                              const SwitchConfig& cfg, Rate link_rate,
                              SimTime now) {
    assert(!vcs.empty());
    PortControl p;
    p.abr_capacity = abr_capacity_of(cfg, link_rate, 0.0, 0.0);
    p.n_last = static_cast<double>(vcs.size());
    p.fair_share = p.abr_capacity / p.n_last;
    p.max_alloc_previous = p.fair_share;
    p.max_alloc_current = p.fair_share;
    p.interval_start = now;
    for (VcId vc : vcs) {
        p.per_vc_cell_count[vc] = 0;
        p.activity[vc] = 0.0;
        p.ccr[vc] = 0.0;
        p.first_cell_seen[vc] = false;
    }
    return p;
}

void on_data_or_frm_cell(PortControl& port, const SwitchConfig& cfg,
                         const Cell& cell) {
    auto count = port.per_vc_cell_count.find(cell.vc);
    if (count == port.per_vc_cell_count.end()) {
        throw ProtocolError("forward cell from a VC not set up on this port");
    }
    ++port.input_cell_count;
    ++count->second;
    if (!port.first_cell_seen[cell.vc]) {
        port.first_cell_seen[cell.vc] = true;
        ++port.vcs_seen;
    }
    if (cell.kind == CellKind::ForwardRm &&
        cfg.variant != SwitchVariant::NeffMeasured) {
        // neff-measured deliberately ignores the declared CCR; everyone
        // else takes the source's word for it.
        port.ccr[cell.vc] = cell.rm->ccr;
    }
}

bool end_interval(PortControl& port, const SwitchConfig& cfg, Rate link_rate,
                  SimTime now) {
    const double elapsed = now - port.interval_start;
    if (elapsed <= 0.0) return false;

    port.abr_capacity =
        abr_capacity_of(cfg, link_rate, port.vbr_usage, port.cbr_usage);
    const Rate input_rate = port.input_cell_count * kCellBits / elapsed;
    port.rho = std::max(cfg.rho_floor, input_rate / port.abr_capacity);

    if (cfg.variant == SwitchVariant::NeffCcr ||
        cfg.variant == SwitchVariant::NeffMeasured) {
        if (!cfg.first_cell_guard || port.vcs_seen >= port.n_last) {
            port.n_last = std::max(1.0, port.n_current);
        }
        port.n_current = 0.0;
        port.fair_share = port.abr_capacity / port.n_last;
        for (auto& [vc, ccr] : port.ccr) {
            if (cfg.variant == SwitchVariant::NeffMeasured) {
                const Rate measured =
                    port.per_vc_cell_count[vc] * kCellBits / elapsed;
                ccr = cfg.rate_smoothing * ccr +
                      (1.0 - cfg.rate_smoothing) * measured;
            }
            double& a = port.activity[vc];
            a = std::min(1.0, ccr / port.fair_share);
            port.n_current += a;
        }
    } else {
        int active = 0;
        for (const auto& [vc, n] : port.per_vc_cell_count) {
            (void)vc;
            if (n > 0) ++active;
        }
        port.n_last = static_cast<double>(std::max(1, active));
        port.fair_share = port.abr_capacity / port.n_last;
        if (cfg.variant == SwitchVariant::EricaFair) {
            port.max_alloc_previous = port.max_alloc_current;
            port.max_alloc_current = port.fair_share;
        }
    }

    port.input_cell_count = 0;
    for (auto& [vc, n] : port.per_vc_cell_count) {
        (void)vc;
        n = 0;
    }
    port.interval_start = now;
    return true;
}

Rate compute_er(PortControl& port, const SwitchConfig& cfg, VcId vc) {
    auto it = port.ccr.find(vc);
    if (it == port.ccr.end()) {
        throw ProtocolError("ER requested for a VC not set up on this port");
    }
    assert(port.rho > 0.0);
    const Rate vc_share = it->second / port.rho;
    Rate base = std::max(port.fair_share, vc_share);
    if (cfg.variant == SwitchVariant::EricaFair &&
        port.rho <= 1.0 + cfg.delta) {
        base = std::max(base, port.max_alloc_previous);
        port.max_alloc_current = std::max(port.max_alloc_current, base);
    }
    return std::min(base, port.abr_capacity);
}

FeedbackDecision on_brm_cell(PortControl& port, const SwitchConfig& cfg,
                             RmPayload& rm, VcId vc) {
    const Rate computed = compute_er(port, cfg, vc);
    const Rate er = std::min(rm.er, computed);
    rm.er = er;
    return {er, computed};
}

}  // namespace abrsim
