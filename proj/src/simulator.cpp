#include "aanet/simulator.hpp"

#include "aanet/errors.hpp"
#include "aanet/parallel.hpp"
#include "aanet/rng.hpp"
#include "aanet/units.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <ostream>

namespace aanet::sim {

const char* to_string(RouteStatus s) {
    switch (s) {
    case RouteStatus::Delivered: return "Delivered";
    case RouteStatus::VoidFailure: return "VoidFailure";
    case RouteStatus::HopLimit: return "HopLimit";
    case RouteStatus::NoCandidates: return "NoCandidates";
    }
    return "?";
}

const char* to_string(Policy::Kind k) {
    switch (k) {
    case Policy::Kind::Optimal: return "optimal";
    case Policy::Kind::Greedy: return "greedy";
    case Policy::Kind::Glsr: return "glsr";
    case Policy::Kind::DlNofb: return "dl-nofb";
    case Policy::Kind::DlFb: return "dl-fb";
    case Policy::Kind::DlMo: return "dl-mo";
    }
    return "?";
}

RouteOutcome route_on_graph(const net::LinkGraph& g, int src, int dst, const Policy& p,
                            int K, int hop_limit) {
    if (src < 0 || src >= g.size() || dst < 0 || dst >= g.size())
        throw DataError("route_on_graph: unknown node");

    RouteOutcome out;
    out.path.nodes = {src};
    if (src == dst) {
        out.status = RouteStatus::Delivered;
        return out;
    }

    if (p.kind == Policy::Kind::Optimal) {
        auto path = net::dijkstra_min_delay(g, src, dst);
        if (!path) {
            out.status = RouteStatus::NoCandidates;
            return out;
        }
        out.path = *path;
        out.hops = path->hops();
        out.metrics = net::path_metrics(g, *path);
        out.status = RouteStatus::Delivered;
        return out;
    }

    const bool needs_est = p.kind == Policy::Kind::DlNofb || p.kind == Policy::Kind::DlFb ||
                           p.kind == Policy::Kind::DlMo;
    if (needs_est && !p.estimator) throw ConfigError("route_on_graph: policy needs an estimator");
    const bool with_reports =
        p.kind == Policy::Kind::DlFb || p.kind == Policy::Kind::DlMo;

    int cur = src;
    while (out.hops < hop_limit) {
        const auto view =
            route::build_view(g, cur, dst, out.path.nodes, K,
                              needs_est ? p.estimator : nullptr, with_reports,
                              p.eps_c_bps, p.eps_l_s);
        if (view.candidates.empty()) {
            out.status = RouteStatus::NoCandidates;
            return out;
        }
        std::optional<int> next;
        switch (p.kind) {
        case Policy::Kind::Greedy: next = route::greedy_next_hop(view); break;
        case Policy::Kind::Glsr: next = route::glsr_next_hop(view); break;
        case Policy::Kind::DlNofb: next = route::dl_next_hop_nofb(view); break;
        case Policy::Kind::DlFb: next = route::dl_next_hop_fb(view); break;
        case Policy::Kind::DlMo:
            next = route::dl_mo_next_hop(view, p.eps_c_bps, p.eps_l_s, p.lambda);
            break;
        default: break;
        }
        if (!next) {
            out.status = RouteStatus::VoidFailure;
            return out;
        }
        out.path.nodes.push_back(*next);
        ++out.hops;
        cur = *next;
        if (cur == dst) {
            out.status = RouteStatus::Delivered;
            out.metrics = net::path_metrics(g, out.path);
            return out;
        }
    }
    out.status = RouteStatus::HopLimit;
    return out;
}

namespace {

std::uint64_t packet_seed(const SimConfig& cfg, double ts, const std::string& src) {
    return rng::substream(cfg.seed, "packet-queue", std::bit_cast<std::uint64_t>(ts),
                          rng::fnv1a(src));
}

net::LinkGraph packet_graph(const flight::Scenario& sc, double ts,
                            const net::LifetimeProvider& lifetimes,
                            const SimConfig& cfg, std::uint64_t seed) {
    auto snap = flight::snapshot(sc, ts);
    return net::build_graph(snap, cfg.queue, cfg.rp, lifetimes, seed);
}

net::LifetimeProvider make_lifetimes(const flight::Scenario& sc, const SimConfig& cfg) {
    return cfg.lifetimes ? net::scenario_lifetimes(sc, cfg.lifetime_params)
                         : net::zero_lifetimes();
}

} // namespace

RouteOutcome route_packet(const flight::Scenario& sc, double ts, const std::string& src,
                          const std::string& dst, const Policy& p, const SimConfig& cfg) {
    const auto lifetimes = make_lifetimes(sc, cfg);
    auto g = packet_graph(sc, ts, lifetimes, cfg, packet_seed(cfg, ts, src));
    const int s = g.index_of(src);
    const int d = g.index_of(dst);
    if (s < 0) throw DataError("route_packet: source " + src + " absent at ts");
    if (d < 0) throw DataError("route_packet: destination " + dst + " absent at ts");
    return route_on_graph(g, s, d, p, cfg.K, cfg.hop_limit);
}

std::size_t EvalReport::delivered() const {
    std::size_t n = 0;
    for (const auto& r : results)
        if (r.outcome.status == RouteStatus::Delivered) ++n;
    return n;
}

double EvalReport::mean_delay_s() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : results)
        if (r.outcome.status == RouteStatus::Delivered) {
            sum += r.outcome.metrics.delay_s;
            ++n;
        }
    return n == 0 ? net::kInf : sum / static_cast<double>(n);
}

double EvalReport::success_prob(double threshold_s) const {
    if (results.empty()) return 0.0;
    std::size_t n = 0;
    for (const auto& r : results)
        if (r.outcome.status == RouteStatus::Delivered &&
            r.outcome.metrics.delay_s < threshold_s)
            ++n;
    return static_cast<double>(n) / static_cast<double>(results.size());
}

std::vector<std::pair<double, double>> EvalReport::delay_cdf() const {
    std::vector<double> delays;
    for (const auto& r : results)
        if (r.outcome.status == RouteStatus::Delivered)
            delays.push_back(units::to_ms(r.outcome.metrics.delay_s));
    std::sort(delays.begin(), delays.end());
    std::vector<std::pair<double, double>> cdf;
    const double total = static_cast<double>(results.size());
    for (std::size_t i = 0; i < delays.size(); ++i)
        cdf.emplace_back(delays[i], static_cast<double>(i + 1) / total);
    return cdf;
}

EvalReport eval_policy(const flight::Scenario& sc, const std::vector<double>& timestamps,
                       const std::string& dst, const Policy& p, const SimConfig& cfg) {
    if (timestamps.empty()) throw ConfigError("eval_policy: no timestamps");
    const auto lifetimes = make_lifetimes(sc, cfg);

    // enumerate packets: one per airborne flight per timestamp
    struct Task {
        double ts;
        std::string src;
    };
    std::vector<Task> tasks;
    for (double ts : timestamps) {
        auto snap = flight::snapshot(sc, ts);
        for (const auto& n : snap.nodes) {
            bool is_gs = false;
            for (const auto& gsn : sc.ground_stations) is_gs |= gsn.id == n.id;
            if (!is_gs && n.id != dst) tasks.push_back({ts, n.id});
        }
    }

    EvalReport report;
    report.policy = to_string(p.kind);
    report.results.resize(tasks.size());
    parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
        const auto& t = tasks[i];
        auto g = packet_graph(sc, t.ts, lifetimes, cfg, packet_seed(cfg, t.ts, t.src));
        const int s = g.index_of(t.src);
        const int d = g.index_of(dst);
        if (s < 0 || d < 0) throw DataError("eval_policy: node absent from snapshot");
        report.results[i] = {t.ts, t.src, route_on_graph(g, s, d, p, cfg.K, cfg.hop_limit)};
    });
    return report;
}

void write_eval_csv(std::ostream& out, const EvalReport& r) {
    out << "# policy, ts, src, status, delay_ms, capacity_mbps, lifetime_min, hops\n";
    out.precision(12);
    for (const auto& pr : r.results) {
        const bool ok = pr.outcome.status == RouteStatus::Delivered;
        out << r.policy << ',' << pr.ts << ',' << pr.src << ','
            << to_string(pr.outcome.status) << ',';
        if (ok)
            out << units::to_ms(pr.outcome.metrics.delay_s) << ','
                << units::to_mbps(pr.outcome.metrics.capacity_bps) << ','
                << units::to_min(pr.outcome.metrics.lifetime_s);
        else
            out << "inf,0,0";
        out << ',' << pr.outcome.hops << '\n';
    }
}

void write_cdf_csv(std::ostream& out, const EvalReport& r) {
    out << "# delay_ms, cdf\n";
    out.precision(12);
    for (const auto& [delay_ms, frac] : r.delay_cdf())
        out << delay_ms << ',' << frac << '\n';
}

std::vector<SweepEntry> mo_sweep_on_graph(const net::LinkGraph& g, int src, int dst,
                                          const route::Estimator& est,
                                          const data::EpsGrid& grid, double lambda,
                                          int K, int hop_limit) {
    if (!est.multi_objective())
        throw ConfigError("mo_sweep: estimator is not multi-objective");
    std::vector<SweepEntry> entries;
    std::map<std::vector<int>, std::size_t> seen;
    for (int alpha = 0; alpha < grid.l_count(); ++alpha) {
        for (int beta = 0; beta < grid.c_count(); ++beta) {
            Policy p = Policy::dl_mo(&est, grid.eps_c(beta), grid.eps_l(alpha), lambda);
            auto outcome = route_on_graph(g, src, dst, p, K, hop_limit);
            if (outcome.status != RouteStatus::Delivered) continue;
            auto [it, inserted] = seen.emplace(outcome.path.nodes, entries.size());
            if (inserted)
                entries.push_back({grid.eps_c(beta), grid.eps_l(alpha), std::move(outcome)});
        }
    }
    return entries;
}

std::vector<SweepEntry> mo_sweep(const flight::Scenario& sc, double ts,
                                 const std::string& src, const std::string& dst,
                                 const route::Estimator& est, const data::EpsGrid& grid,
                                 double lambda, const SimConfig& cfg) {
    const auto lifetimes = make_lifetimes(sc, cfg);
    auto g = packet_graph(sc, ts, lifetimes, cfg, packet_seed(cfg, ts, src));
    const int s = g.index_of(src);
    const int d = g.index_of(dst);
    if (s < 0 || d < 0) throw DataError("mo_sweep: node absent at ts");
    return mo_sweep_on_graph(g, s, d, est, grid, lambda, cfg.K, cfg.hop_limit);
}

} // namespace aanet::sim
