#pragma once

#include "aanet/netgraph.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace aanet::pareto {

// Routing objectives: delay minimized, capacity and lifetime maximized.
struct ObjectiveVector {
    double delay_s = 0.0;
    double capacity_bps = 0.0;
    double lifetime_s = 0.0;
};

// a dominates b: no objective worse, at least one strictly better.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

struct ParetoPoint {
    net::Path path;
    ObjectiveVector obj;
};

using ParetoSet = std::vector<ParetoPoint>;

// Minimum-delay path on the threshold-filtered graph; empty when no
// feasible path exists.
std::optional<ParetoPoint> solve_eps_constraint(
    const net::LinkGraph& g, int src, int dst, double eps_c_bps, double eps_l_s,
    net::ThresholdMode mode_c = net::ThresholdMode::Inclusive,
    net::ThresholdMode mode_l = net::ThresholdMode::Inclusive);

struct PomorStats {
    int solver_invocations = 0;
    int outer_iterations = 0;
    // objective vectors of feasible solves, per outer sweep, in solve order
    std::vector<std::vector<ObjectiveVector>> sweeps;
};

// Nested epsilon-constraint sweep enumerating the full Pareto set: the
// inner loop advances the capacity demand past each solution found, the
// outer loop advances the lifetime demand past the smallest lifetime seen.
ParetoSet pomor(const net::LinkGraph& g, int src, int dst, PomorStats* stats = nullptr);

// Exhaustive simple-path enumeration followed by a dominance filter.
// Guarded to graphs of at most 12 nodes.
ParetoSet brute_force_pareto(const net::LinkGraph& g, int src, int dst);

// One line per solution: delay_ms, capacity_mbps, lifetime_min, hop_count,
// node ids.
void write_pareto_csv(std::ostream& out, const net::LinkGraph& g, const ParetoSet& ps);

} // namespace aanet::pareto
