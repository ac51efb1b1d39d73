#include "abrsim/scenario.h"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace abrsim {

namespace {

Scenario skeleton(const std::string& name) {
    Scenario s;
    s.name = name;
    return s;
}

void add_node(Scenario& s, const std::string& id, NodeKind kind) {
    s.nodes.push_back({id, kind});
}

void add_link(Scenario& s, const std::string& a, const std::string& b) {
    s.links.push_back({a + "-" + b, a, b, kOc3Mbps, 1000.0});
}

}  // namespace

Scenario build_three_source() {
    Scenario s = skeleton("three-source");
    add_node(s, "S1", NodeKind::Source);
    add_node(s, "S2", NodeKind::Source);
    add_node(s, "S3", NodeKind::Source);
    add_node(s, "SW1", NodeKind::Switch);
    add_node(s, "SW2", NodeKind::Switch);
    add_node(s, "SW3", NodeKind::Switch);
    add_node(s, "D1", NodeKind::Dest);
    add_node(s, "D2", NodeKind::Dest);
    add_node(s, "D3", NodeKind::Dest);
    add_link(s, "S1", "SW1");
    add_link(s, "SW1", "SW2");
    add_link(s, "S2", "SW2");
    add_link(s, "S3", "SW2");
    add_link(s, "SW2", "SW3");  // the shared bottleneck
    add_link(s, "SW3", "D1");
    add_link(s, "SW3", "D2");
    add_link(s, "SW3", "D3");
    // ICRs sum a little above the link rate so the bottleneck starts near
    // unit load; S1 is application-limited well below its fair share.
    s.vcs.push_back({"VC1", {"S1", "SW1", "SW2", "SW3", "D1"}, 10.0, 10.0, {{}}});
    s.vcs.push_back({"VC2", {"S2", "SW2", "SW3", "D2"}, 45.0, kUnboundedRate, {{}}});
    s.vcs.push_back({"VC3", {"S3", "SW2", "SW3", "D3"}, 105.0, kUnboundedRate, {{}}});
    return s;
}

Scenario build_upstream() {
    Scenario s = skeleton("upstream");
    for (int i = 1; i <= 17; ++i) {
        add_node(s, "S" + std::to_string(i), NodeKind::Source);
    }
    add_node(s, "SW1", NodeKind::Switch);
    add_node(s, "SW2", NodeKind::Switch);
    add_node(s, "SW3", NodeKind::Switch);
    for (int i = 1; i <= 17; ++i) {
        add_node(s, "D" + std::to_string(i), NodeKind::Dest);
    }
    for (int i = 1; i <= 15; ++i) {
        add_link(s, "S" + std::to_string(i), "SW1");
    }
    add_link(s, "SW1", "SW2");  // trunk 1, shared by VC1..VC15
    add_link(s, "S16", "SW2");
    add_link(s, "S17", "SW2");
    add_link(s, "SW2", "SW3");  // trunk 2, shared by VC1, VC16, VC17
    add_link(s, "SW3", "D1");
    for (int i = 2; i <= 15; ++i) {
        add_link(s, "SW2", "D" + std::to_string(i));
    }
    add_link(s, "SW3", "D16");
    add_link(s, "SW3", "D17");

    s.vcs.push_back({"VC1", {"S1", "SW1", "SW2", "SW3", "D1"}, 10.0,
                     kUnboundedRate, {{}}});
    for (int i = 2; i <= 15; ++i) {
        s.vcs.push_back({"VC" + std::to_string(i),
                         {"S" + std::to_string(i), "SW1", "SW2",
                          "D" + std::to_string(i)},
                         10.0, kUnboundedRate, {{}}});
    }
    s.vcs.push_back({"VC16", {"S16", "SW2", "SW3", "D16"}, 10.0,
                     kUnboundedRate, {{}}});
    s.vcs.push_back({"VC17", {"S17", "SW2", "SW3", "D17"}, 10.0,
                     kUnboundedRate, {{}}});
    return s;
}

Scenario build_two_source_transient() {
    Scenario s = skeleton("two-source-transient");
    add_node(s, "S1", NodeKind::Source);
    add_node(s, "S2", NodeKind::Source);
    add_node(s, "SW1", NodeKind::Switch);
    add_node(s, "SW2", NodeKind::Switch);
    add_node(s, "D1", NodeKind::Dest);
    add_node(s, "D2", NodeKind::Dest);
    add_link(s, "S1", "SW1");
    add_link(s, "S2", "SW1");
    add_link(s, "SW1", "SW2");  // the shared bottleneck
    add_link(s, "SW2", "D1");
    add_link(s, "SW2", "D2");
    s.vcs.push_back({"VC1", {"S1", "SW1", "SW2", "D1"}, 70.0,
                     kUnboundedRate, {{}}});
    s.vcs.push_back({"VC2", {"S2", "SW1", "SW2", "D2"}, 70.0,
                     kUnboundedRate, {{WindowMs{60.0, 120.0}}}});
    return s;
}

int link_between(const Scenario& s, const std::string& a,
                 const std::string& b) {
    for (size_t i = 0; i < s.links.size(); ++i) {
        const LinkSpec& l = s.links[i];
        if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

void validate_scenario(const Scenario& s) {
    std::map<std::string, NodeKind> kinds;
    for (const auto& n : s.nodes) {
        if (n.id.empty()) throw ConfigError("node id must not be empty");
        if (!kinds.emplace(n.id, n.kind).second) {
            throw ConfigError("duplicate node id: " + n.id);
        }
    }
    std::set<std::string> link_ids;
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& l : s.links) {
        if (!link_ids.insert(l.id).second) {
            throw ConfigError("duplicate link id: " + l.id);
        }
        if (!kinds.count(l.a) || !kinds.count(l.b)) {
            throw ConfigError("link " + l.id + " references unknown node");
        }
        if (l.a == l.b) throw ConfigError("link " + l.id + " is a self-loop");
        auto key = std::minmax(l.a, l.b);
        if (!pairs.insert(key).second) {
            throw ConfigError("parallel links between " + l.a + " and " + l.b +
                              " are not supported");
        }
        if (!(l.rate_mbps > 0.0)) {
            throw ConfigError("link " + l.id + " rate must be positive");
        }
        if (l.length_km < 0.0) {
            throw ConfigError("link " + l.id + " length must be non-negative");
        }
    }
    if (!(s.default_pcr > 0.0)) throw ConfigError("pcr must be positive");
    if (s.default_nrm < 1) throw ConfigError("nrm must be >= 1");

    std::set<std::string> vc_names;
    for (const auto& vc : s.vcs) {
        if (!vc_names.insert(vc.name).second) {
            throw ConfigError("duplicate vc name: " + vc.name);
        }
        if (vc.route.size() < 2) {
            throw ConfigError("vc " + vc.name + ": route needs >= 2 nodes");
        }
        std::set<std::string> seen;
        for (const auto& hop : vc.route) {
            if (!kinds.count(hop)) {
                throw ConfigError("vc " + vc.name + ": unknown node " + hop);
            }
            if (!seen.insert(hop).second) {
                throw ConfigError("vc " + vc.name + ": route revisits " + hop);
            }
        }
        if (kinds.at(vc.route.front()) != NodeKind::Source) {
            throw ConfigError("vc " + vc.name + ": route must start at a source");
        }
        if (kinds.at(vc.route.back()) != NodeKind::Dest) {
            throw ConfigError("vc " + vc.name + ": route must end at a dest");
        }
        for (size_t i = 1; i + 1 < vc.route.size(); ++i) {
            if (kinds.at(vc.route[i]) != NodeKind::Switch) {
                throw ConfigError("vc " + vc.name + ": " + vc.route[i] +
                                  " is not a switch");
            }
        }
        for (size_t i = 0; i + 1 < vc.route.size(); ++i) {
            if (link_between(s, vc.route[i], vc.route[i + 1]) < 0) {
                throw ConfigError("vc " + vc.name + ": no link between " +
                                  vc.route[i] + " and " + vc.route[i + 1]);
            }
        }
        if (!(vc.icr_mbps > 0.0) || vc.icr_mbps > s.default_pcr) {
            throw ConfigError("vc " + vc.name + ": icr must be in (0, pcr]");
        }
        if (!(vc.app_cap_mbps > 0.0)) {
            throw ConfigError("vc " + vc.name + ": app_cap must be positive");
        }
        if (vc.windows.empty()) {
            throw ConfigError("vc " + vc.name + ": needs at least one window");
        }
        double prev_stop = 0.0;
        bool first = true;
        for (const auto& w : vc.windows) {
            if (w.start_ms < 0.0 || !(w.stop_ms > w.start_ms)) {
                throw ConfigError("vc " + vc.name + ": bad window");
            }
            if (!first && w.start_ms < prev_stop) {
                throw ConfigError("vc " + vc.name + ": windows overlap");
            }
            prev_stop = w.stop_ms;
            first = false;
        }
    }
}

// ---------------------------------------------------------------- files

namespace {

std::string fmt_number(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct LineParser {
    int lineno = 0;
    std::vector<std::string> tok;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
    }

    double number(const std::string& t, bool allow_inf = false) const {
        if (allow_inf && (t == "inf" || t == "unbounded")) {
            return std::numeric_limits<double>::infinity();
        }
        double v = 0.0;
        auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
            fail("expected a number, got '" + t + "'");
        }
        return v;
    }

    void want(size_t n) const {
        if (tok.size() != n) fail("expected " + std::to_string(n) + " tokens");
    }
};

}  // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    std::map<std::string, size_t> vc_index;
    std::set<std::string> seen_window;  // vcs whose default window was replaced

    std::istringstream in(text);
    std::string raw;
    LineParser lp;
    while (std::getline(in, raw)) {
        ++lp.lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        lp.tok.clear();
        std::istringstream ls(raw);
        std::string t;
        while (ls >> t) lp.tok.push_back(t);
        if (lp.tok.empty()) continue;

        const std::string& head = lp.tok[0];
        if (head == "scenario") {
            lp.want(2);
            s.name = lp.tok[1];
        } else if (head == "default") {
            lp.want(3);
            if (lp.tok[1] == "pcr") {
                s.default_pcr = lp.number(lp.tok[2]);
            } else if (lp.tok[1] == "nrm") {
                s.default_nrm = static_cast<int>(lp.number(lp.tok[2]));
            } else {
                lp.fail("unknown default '" + lp.tok[1] + "'");
            }
        } else if (head == "node") {
            lp.want(3);
            NodeKind kind;
            if (lp.tok[2] == "source") kind = NodeKind::Source;
            else if (lp.tok[2] == "switch") kind = NodeKind::Switch;
            else if (lp.tok[2] == "dest") kind = NodeKind::Dest;
            else lp.fail("unknown node kind '" + lp.tok[2] + "'");
            s.nodes.push_back({lp.tok[1], kind});
        } else if (head == "link") {
            lp.want(6);
            s.links.push_back({lp.tok[1], lp.tok[2], lp.tok[3],
                               lp.number(lp.tok[4]), lp.number(lp.tok[5])});
        } else if (head == "vc") {
            if (lp.tok.size() < 3) lp.fail("vc line needs a name and a key");
            const std::string& name = lp.tok[1];
            auto it = vc_index.find(name);
            if (it == vc_index.end()) {
                it = vc_index.emplace(name, s.vcs.size()).first;
                VcSpec v;
                v.name = name;
                s.vcs.push_back(v);
            }
            VcSpec& v = s.vcs[it->second];
            const std::string& key = lp.tok[2];
            if (key == "route") {
                if (lp.tok.size() < 5) lp.fail("route needs >= 2 nodes");
                if (!v.route.empty()) lp.fail("vc " + name + ": duplicate route");
                v.route.assign(lp.tok.begin() + 3, lp.tok.end());
            } else if (key == "icr") {
                lp.want(4);
                v.icr_mbps = lp.number(lp.tok[3]);
            } else if (key == "app_cap") {
                lp.want(4);
                v.app_cap_mbps = lp.number(lp.tok[3], true);
            } else if (key == "window") {
                lp.want(5);
                if (!seen_window.count(name)) {
                    v.windows.clear();
                    seen_window.insert(name);
                }
                v.windows.push_back(
                    {lp.number(lp.tok[3]), lp.number(lp.tok[4], true)});
            } else {
                lp.fail("unknown vc key '" + key + "'");
            }
        } else {
            lp.fail("unknown directive '" + head + "'");
        }
    }

    for (const auto& vc : s.vcs) {
        if (vc.route.empty()) {
            throw ConfigError("vc " + vc.name + ": missing route");
        }
        if (vc.icr_mbps == 0.0) {
            throw ConfigError("vc " + vc.name + ": missing icr");
        }
    }
    validate_scenario(s);
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "scenario " << s.name << "\n";
    out << "default pcr " << fmt_number(s.default_pcr) << "\n";
    out << "default nrm " << s.default_nrm << "\n";
    for (const auto& n : s.nodes) {
        const char* kind = n.kind == NodeKind::Source   ? "source"
                           : n.kind == NodeKind::Switch ? "switch"
                                                        : "dest";
        out << "node " << n.id << " " << kind << "\n";
    }
    for (const auto& l : s.links) {
        out << "link " << l.id << " " << l.a << " " << l.b << " "
            << fmt_number(l.rate_mbps) << " " << fmt_number(l.length_km)
            << "\n";
    }
    for (const auto& vc : s.vcs) {
        out << "vc " << vc.name << " route";
        for (const auto& hop : vc.route) out << " " << hop;
        out << "\n";
        out << "vc " << vc.name << " icr " << fmt_number(vc.icr_mbps) << "\n";
        out << "vc " << vc.name << " app_cap " << fmt_number(vc.app_cap_mbps)
            << "\n";
        for (const auto& w : vc.windows) {
            out << "vc " << vc.name << " window " << fmt_number(w.start_ms)
                << " " << fmt_number(w.stop_ms) << "\n";
        }
    }
    return out.str();
}

NetworkModel to_network_model(const Scenario& s, const SwitchConfig& cfg) {
    NetworkModel net;
    for (size_t i = 0; i < s.links.size(); ++i) {
        net.links[static_cast<LinkId>(i)] =
            abr_capacity_of(cfg, s.links[i].rate_mbps, 0.0, 0.0);
    }
    for (size_t v = 0; v < s.vcs.size(); ++v) {
        std::vector<LinkId>& route = net.routes[static_cast<VcId>(v)];
        const auto& hops = s.vcs[v].route;
        for (size_t i = 0; i + 1 < hops.size(); ++i) {
            route.push_back(link_between(s, hops[i], hops[i + 1]));
        }
    }
    return net;
}

std::vector<Rate> demand_caps(const Scenario& s) {
    std::vector<Rate> caps;
    caps.reserve(s.vcs.size());
    for (const auto& vc : s.vcs) {
        caps.push_back(std::min(vc.app_cap_mbps, s.default_pcr));
    }
    return caps;
}

}  // namespace abrsim
