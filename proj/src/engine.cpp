#include "abrsim/engine.h"

#include <algorithm>
#include <cassert>
#include <queue>

#include "abrsim/source.h"

namespace abrsim {

double value_at(const TraceSeries& series, SimTime t) {
    double v = 0.0;
    for (const auto& p : series) {
        if (p.t_us > t) break;
        v = p.value;
    }
    return v;
}

double mean_between(const TraceSeries& series, SimTime from, SimTime to) {
    if (!(to > from)) throw std::invalid_argument("empty window");
    double acc = 0.0;
    double cursor = from;
    double v = value_at(series, from);
    for (const auto& p : series) {
        if (p.t_us <= from) continue;
        if (p.t_us >= to) break;
        acc += v * (p.t_us - cursor);
        cursor = p.t_us;
        v = p.value;
    }
    acc += v * (to - cursor);
    return acc / (to - from);
}

double utilization(const TraceSet& traces, const std::string& port,
                   SimTime from, SimTime to) {
    if (!(to > from)) throw std::invalid_argument("empty window");
    auto series = traces.cum_cells_out.find(port);
    auto rate = traces.port_rate.find(port);
    if (series == traces.cum_cells_out.end() || rate == traces.port_rate.end()) {
        throw std::invalid_argument("unknown port: " + port);
    }
    const double cells =
        value_at(series->second, to) - value_at(series->second, from);
    return cells * kCellBits / ((to - from) * rate->second);
}

double emission_rate(const TraceSet& traces, VcId vc, SimTime from,
                     SimTime to) {
    if (!(to > from)) throw std::invalid_argument("empty window");
    const auto& series = traces.cum_cells_emitted.at(vc);
    const double cells = value_at(series, to) - value_at(series, from);
    return cells * kCellBits / (to - from);
}

namespace {

enum class Ev {
    WindowStart,
    SourceEmit,
    PortDeparture,
    Arrival,
    IntervalTimer,
    GridSample,
};

struct Event {
    SimTime t = 0.0;
    std::uint64_t order = 0;  // insertion tiebreak, keeps runs identical
    Ev kind = Ev::GridSample;
    int port = -1;
    VcId vc = -1;
    std::uint64_t epoch = 0;
    Cell cell;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.order > b.order;
    }
};

struct Port {
    std::string id;
    int to_node = -1;
    Rate rate = 0.0;
    double prop_us = 0.0;
    std::deque<Cell> fifo;
    bool busy = false;
    long long cells_in = 0;
    long long cells_out = 0;
    std::optional<PortControl> control;
    std::vector<VcId> member_vcs;  // forward users, in VcId order
    std::uint64_t epoch = 0;       // invalidates stale interval timers
    // utilization-window bookkeeping
    long long util_cells_mark = 0;
    SimTime util_t_mark = 0.0;
    SimTime last_sample_t = -1.0;
};

struct Hop {
    bool forward = true;
    int index = 0;  // position along the VC's path
};

struct VcRuntime {
    SourceState src;
    std::vector<int> fwd_ports;
    std::vector<int> rev_ports;
    std::vector<int> rev_stamp;  // control port applied when entering rev hop
    std::map<int, Hop> hop_of_port;
    std::uint64_t emit_epoch = 0;  // pacing chain id, bumped per window
    long long emitted = 0;
    long long delivered = 0;
};

class Sim {
public:
    Sim(const Scenario& sc, const SwitchConfig& cfg, SimTime duration,
        const RunOptions& opts)
        : sc_(sc), cfg_(cfg), duration_(duration), opts_(opts) {
        validate_config(cfg_);
        validate_scenario(sc_);
        if (!(duration_ > 0.0)) throw ConfigError("duration must be positive");
        if (!(opts_.trace_grid_us > 0.0)) {
            throw ConfigError("trace grid must be positive");
        }
        build();
    }

    TraceSet run() {
        seed_events();
        sample_all(0.0);
        while (!heap_.empty() && heap_.top().t <= duration_) {
            Event ev = heap_.top();
            heap_.pop();
            now_ = ev.t;
            dispatch(ev);
        }
        now_ = duration_;
        sample_all(duration_);
        finish_traces();
        return std::move(traces_);
    }

private:
    // ------------------------------------------------------------ setup

    void build() {
        for (size_t i = 0; i < sc_.nodes.size(); ++i) {
            node_index_[sc_.nodes[i].id] = static_cast<int>(i);
        }
        for (const auto& l : sc_.links) {
            make_port(l, l.a, l.b);
            make_port(l, l.b, l.a);
        }
        for (size_t v = 0; v < sc_.vcs.size(); ++v) {
            add_vc(static_cast<VcId>(v), sc_.vcs[v]);
        }
        // Switch output ports carrying forward traffic get rate control.
        for (size_t i = 0; i < ports_.size(); ++i) {
            Port& p = ports_[i];
            if (p.member_vcs.empty()) continue;
            p.control = make_port_control(p.member_vcs, cfg_, p.rate, 0.0);
            traces_.port_ids.push_back(p.id);
            traces_.port_rate[p.id] = p.rate;
        }
    }

    void make_port(const LinkSpec& l, const std::string& from,
                   const std::string& to) {
        Port p;
        p.id = from + "->" + to;
        p.to_node = node_index_.at(to);
        p.rate = l.rate_mbps;
        p.prop_us = propagation_delay_us(l.length_km);
        port_index_[p.id] = static_cast<int>(ports_.size());
        ports_.push_back(std::move(p));
    }

    int port_of(const std::string& from, const std::string& to) const {
        return port_index_.at(from + "->" + to);
    }

    void add_vc(VcId id, const VcSpec& spec) {
        VcRuntime v;
        v.src.vc = id;
        v.src.icr = spec.icr_mbps;
        v.src.acr = spec.icr_mbps;
        v.src.pcr = sc_.default_pcr;
        v.src.app_cap = spec.app_cap_mbps;
        v.src.nrm = sc_.default_nrm;
        v.src.cells_since_rm = sc_.default_nrm - 1;  // first cell is an FRM
        for (const auto& w : spec.windows) {
            v.src.windows.push_back({w.start_ms * 1000.0, w.stop_ms * 1000.0});
        }

        const auto& hops = spec.route;
        const int k = static_cast<int>(hops.size()) - 1;
        for (int i = 0; i < k; ++i) {
            v.fwd_ports.push_back(port_of(hops[i], hops[i + 1]));
        }
        for (int j = 0; j < k; ++j) {
            v.rev_ports.push_back(port_of(hops[k - j], hops[k - j - 1]));
            // The switch the BRM is leaving stamps it with the ER of its
            // forward output port for this VC; hop 0 leaves the dest.
            v.rev_stamp.push_back(j >= 1 ? v.fwd_ports[k - j] : -1);
        }
        for (int i = 0; i < k; ++i) {
            v.hop_of_port[v.fwd_ports[i]] = {true, i};
            v.hop_of_port[v.rev_ports[i]] = {false, i};
        }
        for (int i = 1; i < k; ++i) {
            ports_[v.fwd_ports[i]].member_vcs.push_back(id);
        }
        vcs_.push_back(std::move(v));
        traces_.vc_names.push_back(spec.name);
    }

    void seed_events() {
        for (size_t v = 0; v < vcs_.size(); ++v) {
            record_acr(static_cast<VcId>(v), 0.0);
            for (const auto& w : vcs_[v].src.windows) {
                if (w.start_us <= duration_) {
                    schedule(w.start_us, Ev::WindowStart, -1,
                             static_cast<VcId>(v));
                }
            }
        }
        for (size_t i = 0; i < ports_.size(); ++i) {
            if (ports_[i].control) {
                schedule(cfg_.interval_max_us, Ev::IntervalTimer,
                         static_cast<int>(i));
            }
        }
        schedule(opts_.trace_grid_us, Ev::GridSample);
    }

    void schedule(SimTime t, Ev kind, int port = -1, VcId vc = -1,
                  std::uint64_t epoch = 0, Cell cell = {}) {
        Event ev;
        ev.t = t;
        ev.order = next_order_++;
        ev.kind = kind;
        ev.port = port;
        ev.vc = vc;
        ev.epoch = epoch;
        ev.cell = std::move(cell);
        heap_.push(std::move(ev));
    }

    // --------------------------------------------------------- handlers

    void dispatch(const Event& ev) {
        switch (ev.kind) {
        case Ev::WindowStart: {
            VcRuntime& v = vcs_[ev.vc];
            if (!in_active_window(v.src, now_)) return;
            ++v.emit_epoch;  // orphan any pacing event from an earlier window
            v.src.next_emit_us = now_;
            emit_from(ev.vc);
            break;
        }
        case Ev::SourceEmit: {
            VcRuntime& v = vcs_[ev.vc];
            if (ev.epoch != v.emit_epoch) return;
            if (!in_active_window(v.src, now_)) return;
            emit_from(ev.vc);
            break;
        }
        case Ev::PortDeparture:
            depart(ev.port);
            break;
        case Ev::Arrival:
            arrive(ev.port, ev.cell);
            break;
        case Ev::IntervalTimer:
            if (ev.epoch == ports_[ev.port].epoch) interval_end(ev.port);
            break;
        case Ev::GridSample:
            sample_all(now_);
            schedule(now_ + opts_.trace_grid_us, Ev::GridSample);
            break;
        }
    }

    void emit_from(VcId id) {
        VcRuntime& v = vcs_[id];
        Cell c = emit_next(v.src, now_);
        ++v.emitted;
        enqueue_forward(v.fwd_ports[0], c);
        schedule(v.src.next_emit_us, Ev::SourceEmit, -1, id, v.emit_epoch);
    }

    void enqueue_forward(int port_ix, const Cell& cell) {
        Port& p = ports_[port_ix];
        if (p.control) {
            on_data_or_frm_cell(*p.control, cfg_, cell);
            if (p.control->input_cell_count >= cfg_.interval_cells) {
                interval_end(port_ix);
            }
        }
        p.fifo.push_back(cell);
        ++p.cells_in;
        start_tx(port_ix);
    }

    void enqueue_reverse(VcId id, int hop, Cell cell) {
        VcRuntime& v = vcs_[id];
        const int stamp_port = v.rev_stamp[hop];
        if (stamp_port >= 0) {
            Port& sp = ports_[stamp_port];
            const FeedbackDecision fb =
                on_brm_cell(*sp.control, cfg_, *cell.rm, id);
            if (opts_.brm_audit) {
                opts_.brm_audit({id, cell.seq, sp.id, fb.er_computed,
                                 fb.er_out, now_});
            }
        }
        Port& p = ports_[v.rev_ports[hop]];
        p.fifo.push_back(cell);
        ++p.cells_in;
        start_tx(v.rev_ports[hop]);
    }

    void start_tx(int port_ix) {
        Port& p = ports_[port_ix];
        if (p.busy || p.fifo.empty()) return;
        p.busy = true;
        schedule(now_ + cell_transmission_time_us(p.rate),
                 Ev::PortDeparture, port_ix);
    }

    void depart(int port_ix) {
        Port& p = ports_[port_ix];
        assert(!p.fifo.empty());
        Cell c = p.fifo.front();
        p.fifo.pop_front();
        ++p.cells_out;
        p.busy = false;
        schedule(now_ + p.prop_us, Ev::Arrival, port_ix, -1, 0, c);
        start_tx(port_ix);
    }

    void arrive(int port_ix, const Cell& cell) {
        VcRuntime& v = vcs_[cell.vc];
        const Hop hop = v.hop_of_port.at(port_ix);
        const int k = static_cast<int>(v.fwd_ports.size());
        if (hop.forward) {
            if (hop.index + 1 < k) {
                enqueue_forward(v.fwd_ports[hop.index + 1], cell);
            } else if (cell.kind == CellKind::ForwardRm) {
                enqueue_reverse(cell.vc, 0, turn_around(cell));
            } else {
                ++v.delivered;
            }
        } else {
            if (hop.index + 1 < k) {
                enqueue_reverse(cell.vc, hop.index + 1, cell);
            } else {
                on_brm(v.src, *cell.rm);
                record_acr(cell.vc, now_);
            }
        }
    }

    void interval_end(int port_ix) {
        Port& p = ports_[port_ix];
        if (!end_interval(*p.control, cfg_, p.rate, now_)) return;
        ++p.epoch;
        schedule(now_ + cfg_.interval_max_us, Ev::IntervalTimer, port_ix,
                 -1, p.epoch);
        sample_port(port_ix, now_);
    }

    // ----------------------------------------------------------- traces

    void record_acr(VcId id, SimTime t) {
        TraceSeries& s = traces_.acr[id];
        const double v = vcs_[id].src.acr;
        if (!s.empty() && s.back().value == v) return;
        s.push_back({t, v});
    }

    void sample_port(int port_ix, SimTime t) {
        Port& p = ports_[port_ix];
        if (p.last_sample_t == t) return;
        p.last_sample_t = t;
        traces_.queue_cells[p.id].push_back(
            {t, static_cast<double>(p.fifo.size())});
        traces_.neff[p.id].push_back({t, p.control->n_last});
        traces_.cum_cells_out[p.id].push_back(
            {t, static_cast<double>(p.cells_out)});
        if (t > p.util_t_mark) {
            const double cells =
                static_cast<double>(p.cells_out - p.util_cells_mark);
            traces_.util[p.id].push_back(
                {t, cells * kCellBits / ((t - p.util_t_mark) * p.rate)});
        }
        p.util_cells_mark = p.cells_out;
        p.util_t_mark = t;
    }

    void sample_all(SimTime t) {
        for (size_t i = 0; i < ports_.size(); ++i) {
            if (ports_[i].control) sample_port(static_cast<int>(i), t);
        }
        for (size_t v = 0; v < vcs_.size(); ++v) {
            traces_.cum_cells_emitted[static_cast<VcId>(v)].push_back(
                {t, static_cast<double>(vcs_[v].emitted)});
        }
    }

    void finish_traces() {
        traces_.duration_us = duration_;
        traces_.grid_us = opts_.trace_grid_us;
        for (const auto& p : ports_) {
            traces_.port_stats[p.id] = {
                p.cells_in, p.cells_out,
                static_cast<long long>(p.fifo.size())};
        }
    }

    const Scenario& sc_;
    const SwitchConfig& cfg_;
    SimTime duration_;
    RunOptions opts_;

    std::map<std::string, int> node_index_;
    std::map<std::string, int> port_index_;
    std::vector<Port> ports_;
    std::vector<VcRuntime> vcs_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> heap_;
    std::uint64_t next_order_ = 0;
    SimTime now_ = 0.0;
    TraceSet traces_;
};

}  // namespace

TraceSet run(const Scenario& scenario, const SwitchConfig& cfg,
             SimTime duration_us, const RunOptions& opts) {
    Sim sim(scenario, cfg, duration_us, opts);
    return sim.run();
}

}  // namespace abrsim
