#pragma once

#include <string>
#include <vector>

#include "abrsim/core.h"
#include "abrsim/maxmin.h"
#include "abrsim/switch.h"

// Topologies plus a line-oriented scenario file format. Files use Mbps,
// km and ms; '#' starts a comment. The grammar is documented in the
// README; serialize/parse round-trip exactly.

namespace abrsim {

enum class NodeKind { Source, Switch, Dest };

struct NodeSpec {
    std::string id;
    NodeKind kind = NodeKind::Source;
    bool operator==(const NodeSpec&) const = default;
};

struct LinkSpec {
    std::string id;
    std::string a;
    std::string b;
    Rate rate_mbps = kOc3Mbps;
    double length_km = 1000.0;
    bool operator==(const LinkSpec&) const = default;
};

struct WindowMs {
    double start_ms = 0.0;
    double stop_ms = std::numeric_limits<double>::infinity();
    bool operator==(const WindowMs&) const = default;
};

struct VcSpec {
    std::string name;
    std::vector<std::string> route;  // node ids, source ... dest
    Rate icr_mbps = 0.0;
    Rate app_cap_mbps = kUnboundedRate;
    std::vector<WindowMs> windows{{}};
    bool operator==(const VcSpec&) const = default;
};

struct Scenario {
    std::string name;
    Rate default_pcr = kOc3Mbps;
    int default_nrm = 32;
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<VcSpec> vcs;  // VcId = index
    bool operator==(const Scenario&) const = default;
};

// One source held at 10 Mbps by its application plus two greedy sources,
// all meeting at one bottleneck port; 40/30/30 ms round trips.
Scenario build_three_source();

// Fifteen VCs share the first trunk; the first of them continues onto a
// second trunk it shares with two more sources.
Scenario build_upstream();

// Two greedy sources on one bottleneck; the second is only active in
// [60 ms, 120 ms).
Scenario build_two_source_transient();

void validate_scenario(const Scenario& s);  // throws ConfigError

Scenario parse_scenario(const std::string& text);  // throws ConfigError
std::string serialize_scenario(const Scenario& s);

// Index of the link joining two nodes, -1 if absent.
int link_between(const Scenario& s, const std::string& a,
                 const std::string& b);

// The ideal-allocation view of a scenario: every link constrained to the
// capacity the switches would aim for under cfg.
NetworkModel to_network_model(const Scenario& s, const SwitchConfig& cfg);

// Per-VC demand ceiling: min(app_cap, pcr).
std::vector<Rate> demand_caps(const Scenario& s);

}  // namespace abrsim
