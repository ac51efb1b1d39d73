#include "abrsim/maxmin.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace abrsim {

namespace {

void check_profile(const DemandProfile& p) {
    if (!(p.capacity > 0.0)) {
        throw std::invalid_argument("profile capacity must be positive");
    }
    for (Rate c : p.caps) {
        if (std::isnan(c) || c < 0.0) {
            throw std::invalid_argument("caps must be non-negative");
        }
    }
}

bool profile_saturated(const DemandProfile& p) {
    double total = 0.0;
    for (Rate c : p.caps) {
        if (c == kUnboundedRate) return true;
        total += c;
    }
    return total >= p.capacity;
}

}  // namespace

double activity_level(Rate rate, Rate fair_share) {
    if (!(fair_share > 0.0)) {
        throw std::invalid_argument("fair share must be positive");
    }
    return std::min(1.0, rate / fair_share);
}

double effective_n(std::span<const Rate> rates, Rate fair_share) {
    double n = 0.0;
    for (Rate r : rates) n += activity_level(r, fair_share);
    return n;
}

std::pair<Rate, double> neff_iterate_once(std::span<const Rate> rates,
                                          double n_prev, Rate capacity) {
    if (!(n_prev > 0.0)) {
        throw std::invalid_argument("previous VC count must be positive");
    }
    if (!(capacity > 0.0)) {
        throw std::invalid_argument("capacity must be positive");
    }
    const Rate fair_share = capacity / n_prev;
    return {fair_share, effective_n(rates, fair_share)};
}

FixedPointResult neff_fixed_point(const DemandProfile& profile, double n0,
                                  double tol, int max_iter) {
    check_profile(profile);
    if (!(n0 > 0.0)) throw std::invalid_argument("n0 must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

    const bool saturated = profile_saturated(profile);
    double n = n0;
    double n_next = n0;
    for (int it = 1; it <= max_iter; ++it) {
        const Rate f = profile.capacity / n;
        n_next = 0.0;
        for (Rate c : profile.caps) {
            n_next += std::min(1.0, std::min(c, f) / f);
        }
        // f * n_next is the traffic the closed loop would carry at this
        // share; convergence means it matches capacity.
        if (std::abs(f * n_next - profile.capacity) <=
            tol * profile.capacity) {
            return {f, n_next, it, true, !saturated};
        }
        if (n_next <= 0.0) {
            // Every cap has fallen below numeric significance of f; the
            // recursion is pinned, stop early.
            return {profile.capacity / n_next, n_next, it, false, !saturated};
        }
        n = n_next;
    }
    return {profile.capacity / n_next, n_next, max_iter, false, !saturated};
}

std::optional<Rate> waterfill_level(const DemandProfile& profile) {
    check_profile(profile);
    std::vector<Rate> finite;
    int unbounded = 0;
    for (Rate c : profile.caps) {
        if (c == kUnboundedRate) {
            ++unbounded;
        } else {
            finite.push_back(c);
        }
    }
    std::sort(finite.begin(), finite.end());

    double remaining = profile.capacity;
    int k = static_cast<int>(finite.size()) + unbounded;
    for (Rate c : finite) {
        const double level = remaining / k;
        if (c >= level) return level;
        remaining -= c;
        --k;
    }
    if (unbounded > 0) return remaining / unbounded;
    return std::nullopt;  // total demand below capacity
}

int overloading_count(const DemandProfile& profile, Rate fair_share) {
    if (!(fair_share > 0.0)) {
        throw std::invalid_argument("fair share must be positive");
    }
    int n = 0;
    for (Rate c : profile.caps) {
        if (c >= fair_share) ++n;
    }
    return n;
}

namespace {

void check_network(const NetworkModel& net, const std::map<VcId, Rate>& caps) {
    for (const auto& [vc, route] : net.routes) {
        if (route.empty()) {
            throw std::invalid_argument("route must not be empty");
        }
        for (LinkId l : route) {
            if (!net.links.count(l)) {
                throw std::invalid_argument("route references unknown link");
            }
        }
        auto it = caps.find(vc);
        if (it == caps.end()) {
            throw std::invalid_argument("every routed VC needs a cap");
        }
        if (std::isnan(it->second) || it->second < 0.0) {
            throw std::invalid_argument("caps must be non-negative");
        }
    }
    for (const auto& [id, cap] : net.links) {
        (void)id;
        if (!(cap > 0.0)) {
            throw std::invalid_argument("link capacity must be positive");
        }
    }
}

}  // namespace

std::map<VcId, Rate> maxmin_allocate(const NetworkModel& net,
                                     const std::map<VcId, Rate>& caps) {
    check_network(net, caps);

    std::map<LinkId, Rate> residual = net.links;
    std::map<LinkId, std::vector<VcId>> members;
    for (const auto& [vc, route] : net.routes) {
        for (LinkId l : route) members[l].push_back(vc);
    }
    std::set<VcId> unfixed;
    for (const auto& [vc, route] : net.routes) unfixed.insert(vc);

    std::map<VcId, Rate> alloc;
    while (!unfixed.empty()) {
        bool found = false;
        Rate best_level = 0.0;
        LinkId best_link = 0;
        for (const auto& [lid, vcs] : members) {
            std::optional<Rate> level;
            DemandProfile p;
            for (VcId vc : vcs) {
                if (unfixed.count(vc)) p.caps.push_back(caps.at(vc));
            }
            if (p.caps.empty()) continue;
            p.capacity = residual.at(lid);
            if (p.capacity <= 0.0) {
                level = 0.0;  // already consumed by earlier rounds
            } else {
                level = waterfill_level(p);
            }
            if (level && (!found || *level < best_level)) {
                found = true;
                best_level = *level;
                best_link = lid;
            }
        }
        if (!found) {
            // No remaining link can saturate: everyone left is held under
            // capacity by their own cap.
            for (VcId vc : unfixed) alloc[vc] = caps.at(vc);
            break;
        }
        std::vector<VcId> fixed_now;
        for (VcId vc : members.at(best_link)) {
            if (unfixed.count(vc)) fixed_now.push_back(vc);
        }
        for (VcId vc : fixed_now) {
            const Rate a = std::min(caps.at(vc), best_level);
            alloc[vc] = a;
            for (LinkId l : net.routes.at(vc)) {
                residual[l] = std::max(0.0, residual[l] - a);
            }
            unfixed.erase(vc);
        }
    }
    return alloc;
}

bool maxmin_verify(const NetworkModel& net, const std::map<VcId, Rate>& caps,
                   const std::map<VcId, Rate>& alloc, double eps) {
    if (alloc.size() != net.routes.size()) return false;
    for (const auto& [vc, route] : net.routes) {
        (void)route;
        if (!alloc.count(vc) || !caps.count(vc)) return false;
        const Rate a = alloc.at(vc);
        if (std::isnan(a) || a < -eps) return false;
        if (a > caps.at(vc) + eps) return false;
    }

    std::map<LinkId, Rate> load;
    for (const auto& [vc, route] : net.routes) {
        for (LinkId l : route) load[l] += alloc.at(vc);
    }
    for (const auto& [l, sum] : load) {
        if (sum > net.links.at(l) + eps) return false;  // infeasible
    }

    for (const auto& [vc, route] : net.routes) {
        if (alloc.at(vc) >= caps.at(vc) - eps) continue;  // at its own cap
        bool has_bottleneck = false;
        for (LinkId l : route) {
            if (load[l] < net.links.at(l) - eps) continue;  // not saturated
            bool top = true;
            for (const auto& [ovc, oroute] : net.routes) {
                if (ovc == vc) continue;
                bool crosses = false;
                for (LinkId ol : oroute) {
                    if (ol == l) { crosses = true; break; }
                }
                if (crosses && alloc.at(ovc) > alloc.at(vc) + eps) {
                    top = false;
                    break;
                }
            }
            if (top) {
                has_bottleneck = true;
                break;
            }
        }
        if (!has_bottleneck) return false;
    }
    return true;
}

}  // namespace abrsim
