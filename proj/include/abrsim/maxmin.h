#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "abrsim/core.h"

// Offline fairness math: activity levels, the effective-VC-count fixed
// point, single-link water-filling, and a multi-link max-min allocator.
// These are the reference answers the closed-loop switch is tested
// against; nothing in here depends on the simulator.

namespace abrsim {

// Per-VC demand ceilings on one link. A VC with no ceiling of its own
// carries kUnboundedRate.
struct DemandProfile {
    std::vector<Rate> caps;
    Rate capacity = 0.0;
};

struct FixedPointResult {
    Rate fair_share = 0.0;
    double n_eff = 0.0;
    int iterations = 0;
    bool converged = false;
    // Total finite demand below capacity and nothing unbounded: the link
    // can never saturate and no fair-share level exists.
    bool unsaturated = false;
};

using LinkId = int;

struct NetworkModel {
    std::map<LinkId, Rate> links;                 // id -> capacity
    std::map<VcId, std::vector<LinkId>> routes;   // each route non-empty
};

// min(1, rate / fair_share). Requires fair_share > 0.
double activity_level(Rate rate, Rate fair_share);

// Sum of activity levels over all VCs.
double effective_n(std::span<const Rate> rates, Rate fair_share);

// One step of the recursion: fair_share = capacity / n_prev, then the
// effective count those rates produce at that share.
std::pair<Rate, double> neff_iterate_once(std::span<const Rate> rates,
                                          double n_prev, Rate capacity);

// Iterates F <- C / sum_i min(1, min(cap_i, F) / F) from n0 until
// F * n_eff lands within tol * capacity of capacity, i.e. the closed
// loop where capped VCs send at min(cap, F) and the rest at F.
FixedPointResult neff_fixed_point(const DemandProfile& profile, double n0,
                                  double tol = 1e-6, int max_iter = 100);

// The level lambda with sum_i min(cap_i, lambda) = capacity, by
// sort-and-scan. nullopt when total demand is below capacity.
std::optional<Rate> waterfill_level(const DemandProfile& profile);

// Number of VCs whose cap reaches the fair share (ties count as
// reaching it); the remainder are the underloading set.
int overloading_count(const DemandProfile& profile, Rate fair_share);

// Progressive filling: repeatedly saturate the link with the smallest
// water-filling level over its still-unfixed VCs and fix those VCs.
std::map<VcId, Rate> maxmin_allocate(const NetworkModel& net,
                                     const std::map<VcId, Rate>& caps);

// Bottleneck characterization: feasible, and every VC below its cap has
// a saturated route link where no other VC is allocated more (within eps).
bool maxmin_verify(const NetworkModel& net, const std::map<VcId, Rate>& caps,
                   const std::map<VcId, Rate>& alloc, double eps);

}  // namespace abrsim
