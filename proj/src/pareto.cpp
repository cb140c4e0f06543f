#include "aanet/pareto.hpp"

#include "aanet/errors.hpp"
#include "aanet/units.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace aanet::pareto {

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    const bool no_worse = a.delay_s <= b.delay_s && a.capacity_bps >= b.capacity_bps &&
                          a.lifetime_s >= b.lifetime_s;
    const bool strictly_better = a.delay_s < b.delay_s ||
                                 a.capacity_bps > b.capacity_bps ||
                                 a.lifetime_s > b.lifetime_s;
    return no_worse && strictly_better;
}

std::optional<ParetoPoint> solve_eps_constraint(const net::LinkGraph& g, int src,
                                                int dst, double eps_c_bps,
                                                double eps_l_s,
                                                net::ThresholdMode mode_c,
                                                net::ThresholdMode mode_l) {
    const auto r = net::floyd_warshall_constrained(g, eps_c_bps, eps_l_s, mode_c, mode_l);
    auto p = net::extract_path(r, src, dst);
    if (!p) return std::nullopt;
    const auto m = net::path_metrics(g, *p);
    return ParetoPoint{*p, {m.delay_s, m.capacity_bps, m.lifetime_s}};
}

namespace {

bool obj_less(const ParetoPoint& a, const ParetoPoint& b) {
    if (a.obj.delay_s != b.obj.delay_s) return a.obj.delay_s < b.obj.delay_s;
    if (a.obj.capacity_bps != b.obj.capacity_bps)
        return a.obj.capacity_bps > b.obj.capacity_bps;
    if (a.obj.lifetime_s != b.obj.lifetime_s) return a.obj.lifetime_s > b.obj.lifetime_s;
    return a.path.nodes < b.path.nodes;
}

ParetoSet dominance_filter(ParetoSet points) {
    ParetoSet out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j)
            if (j != i && dominates(points[j].obj, points[i].obj)) dominated = true;
        if (!dominated) out.push_back(points[i]);
    }
    std::sort(out.begin(), out.end(), obj_less);
    return out;
}

} // namespace

ParetoSet pomor(const net::LinkGraph& g, int src, int dst, PomorStats* stats) {
    ParetoSet found;
    std::set<std::vector<int>> seen;
    PomorStats local;
    PomorStats& st = stats ? *stats : local;
    st = {};

    constexpr int kMaxInvocations = 100000;
    double eps_l = 0.0;
    auto mode_l = net::ThresholdMode::Inclusive;
    for (;;) {
        ++st.outer_iterations;
        std::vector<double> lifetimes;
        std::vector<ObjectiveVector> sweep;
        double eps_c = 0.0;
        auto mode_c = net::ThresholdMode::Inclusive;
        for (;;) {
            if (++st.solver_invocations > kMaxInvocations)
                throw std::logic_error("pomor: sweep did not terminate");
            auto sol = solve_eps_constraint(g, src, dst, eps_c, eps_l, mode_c, mode_l);
            if (!sol) break;
            sweep.push_back(sol->obj);
            lifetimes.push_back(sol->obj.lifetime_s);
            if (seen.insert(sol->path.nodes).second) found.push_back(*sol);
            // demand strictly more capacity than the solution just found
            eps_c = sol->obj.capacity_bps;
            mode_c = net::ThresholdMode::Exclusive;
        }
        st.sweeps.push_back(std::move(sweep));
        if (lifetimes.empty()) break;
        // demand strictly more lifetime than the smallest one seen
        eps_l = *std::min_element(lifetimes.begin(), lifetimes.end());
        mode_l = net::ThresholdMode::Exclusive;
    }
    return dominance_filter(std::move(found));
}

namespace {

void enumerate_paths(const net::LinkGraph& g, int cur, int dst,
                     std::vector<int>& path, std::vector<char>& visited,
                     ParetoSet& out) {
    if (cur == dst) {
        const auto m = net::path_metrics(g, net::Path{path});
        out.push_back({net::Path{path}, {m.delay_s, m.capacity_bps, m.lifetime_s}});
        return;
    }
    for (int v = 0; v < g.size(); ++v) {
        if (visited[v] || !g.has_edge(cur, v)) continue;
        visited[v] = 1;
        path.push_back(v);
        enumerate_paths(g, v, dst, path, visited, out);
        path.pop_back();
        visited[v] = 0;
    }
}

} // namespace

ParetoSet brute_force_pareto(const net::LinkGraph& g, int src, int dst) {
    if (g.size() > 12)
        throw ConfigError("brute_force_pareto: graph exceeds the 12-node guard");
    ParetoSet all;
    std::vector<int> path{src};
    std::vector<char> visited(g.size(), 0);
    visited[src] = 1;
    enumerate_paths(g, src, dst, path, visited, all);
    return dominance_filter(std::move(all));
}

void write_pareto_csv(std::ostream& out, const net::LinkGraph& g, const ParetoSet& ps) {
    out << "# delay_ms, capacity_mbps, lifetime_min, hop_count, node_ids...\n";
    out.precision(12);
    for (const auto& p : ps) {
        out << units::to_ms(p.obj.delay_s) << ',' << units::to_mbps(p.obj.capacity_bps)
            << ',' << units::to_min(p.obj.lifetime_s) << ',' << p.path.hops();
        for (int v : p.path.nodes) out << ',' << g.node(v).id;
        out << '\n';
    }
}

} // namespace aanet::pareto
