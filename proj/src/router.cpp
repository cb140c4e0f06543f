#include "aanet/router.hpp"

#include "aanet/errors.hpp"
#include "aanet/units.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <unordered_map>

namespace aanet::route {

MLPEstimator::MLPEstimator(nn::MLPParams params, int K, data::DatasetKind kind)
    : params_(std::move(params)), k_(K), kind_(kind) {
    const int expect = kind == data::DatasetKind::SO ? data::so_feature_dim(K)
                                                     : data::mo_feature_dim(K);
    if (params_.spec.input_dim != expect)
        throw ConfigError("MLPEstimator: model input dim " +
                          std::to_string(params_.spec.input_dim) +
                          " does not match K=" + std::to_string(K));
    const int expect_out = kind == data::DatasetKind::SO ? data::so_label_dim(K)
                                                         : data::mo_label_dim(K);
    if (params_.spec.output_dim() != expect_out)
        throw ConfigError("MLPEstimator: model output dim does not match K");
}

SlotEstimates MLPEstimator::estimate(const net::LinkGraph& g, int node,
                                     const std::vector<int>& ranked, int dest,
                                     double eps_c_bps, double eps_l_s) const {
    if (static_cast<int>(ranked.size()) > k_)
        throw ConfigError("MLPEstimator: ranked neighbor list exceeds model K");
    const auto x = kind_ == data::DatasetKind::SO
                       ? data::so_features(g, node, ranked, dest, k_)
                       : data::mo_features(g, node, ranked, dest, k_, eps_c_bps, eps_l_s);
    nn::Matrix batch(1, static_cast<int>(x.size()));
    batch.a = x;
    const auto out = nn::infer(params_, batch);

    SlotEstimates est;
    const int m = static_cast<int>(ranked.size());
    est.delay_ms.assign(out.row(0), out.row(0) + m);
    if (kind_ == data::DatasetKind::MO) {
        est.capacity_mbps.assign(out.row(0) + k_, out.row(0) + k_ + m);
        est.lifetime_min.assign(out.row(0) + 2 * k_, out.row(0) + 2 * k_ + m);
    }
    return est;
}

SoOracleEstimator::SoOracleEstimator(const net::LinkGraph& g)
    : apsp_(net::floyd_warshall_constrained(g, 0.0, 0.0)) {}

SlotEstimates SoOracleEstimator::estimate(const net::LinkGraph&, int,
                                          const std::vector<int>& ranked, int dest,
                                          double, double) const {
    SlotEstimates est;
    for (int j : ranked) {
        const double d = apsp_.d(j, dest);
        est.delay_ms.push_back(d == net::kInf ? data::kLabelSentinel : units::to_ms(d));
    }
    return est;
}

MoOracleEstimator::MoOracleEstimator(const net::LinkGraph& g, int dest,
                                     const data::EpsGrid& grid)
    : tables_(data::mo_label_tables(g, dest, grid)), grid_(grid), dest_(dest) {}

SlotEstimates MoOracleEstimator::estimate(const net::LinkGraph&, int,
                                          const std::vector<int>& ranked, int dest,
                                          double eps_c_bps, double eps_l_s) const {
    if (dest != dest_)
        throw ConfigError("MoOracleEstimator: destination differs from the table build");
    auto snap = [](double v, double v0, double step, int count) {
        const int i = static_cast<int>(std::lround((v - v0) / step));
        return std::clamp(i, 0, count - 1);
    };
    const int beta = snap(eps_c_bps, grid_.eps_c0_bps, grid_.step_c_bps, grid_.c_count());
    const int alpha = snap(eps_l_s, grid_.eps_l0_s, grid_.step_l_s, grid_.l_count());
    const auto& cells = tables_[alpha][beta];

    SlotEstimates est;
    for (int j : ranked) {
        const auto& c = cells[j];
        if (!c.reachable) {
            est.delay_ms.push_back(data::kLabelSentinel);
            est.capacity_mbps.push_back(0.0);
            est.lifetime_min.push_back(0.0);
        } else {
            est.delay_ms.push_back(units::to_ms(c.delay_s));
            est.capacity_mbps.push_back(units::to_mbps(c.capacity_bps));
            est.lifetime_min.push_back(units::to_min(c.lifetime_s));
        }
    }
    return est;
}

namespace {

std::vector<int> loop_excluded(const std::vector<int>& ranked,
                               const std::vector<int>& visited) {
    std::vector<int> out;
    for (int j : ranked)
        if (std::find(visited.begin(), visited.end(), j) == visited.end())
            out.push_back(j);
    return out;
}

} // namespace

LocalView build_view(const net::LinkGraph& g, int self, int dest,
                     const std::vector<int>& visited, int K, const Estimator* est,
                     bool with_reports, double eps_c_bps, double eps_l_s) {
    LocalView v;
    v.self = self;
    v.dest = dest;
    v.visited = visited;
    if (std::find(v.visited.begin(), v.visited.end(), self) == v.visited.end())
        v.visited.push_back(self);

    const auto ranked_self = net::neighbors_ranked(g, self, dest, K);
    v.candidates = loop_excluded(ranked_self, v.visited);
    v.self_dist_to_dest_km = geo::distance_km(g.node(self).pos, g.node(dest).pos);

    SlotEstimates self_est;
    if (est) self_est = est->estimate(g, self, ranked_self, dest, eps_c_bps, eps_l_s);

    for (int j : v.candidates) {
        v.link.push_back(*g.edge(self, j));
        v.cand_dist_to_dest_km.push_back(geo::distance_km(g.node(j).pos, g.node(dest).pos));
        if (est) {
            const auto slot = static_cast<std::size_t>(
                std::find(ranked_self.begin(), ranked_self.end(), j) - ranked_self.begin());
            v.self_est_delay_ms.push_back(self_est.delay_ms[slot]);
            if (est->multi_objective()) {
                v.self_est_capacity_mbps.push_back(self_est.capacity_mbps[slot]);
                v.self_est_lifetime_min.push_back(self_est.lifetime_min[slot]);
            }
        }
    }

    if (with_reports && est) {
        for (int j1 : v.candidates) {
            CandidateReport r;
            r.node = j1;
            const auto ranked_j1 = net::neighbors_ranked(g, j1, dest, K);
            r.candidates = loop_excluded(ranked_j1, v.visited);
            const auto e = est->estimate(g, j1, ranked_j1, dest, eps_c_bps, eps_l_s);
            for (int j2 : r.candidates) {
                r.link.push_back(*g.edge(j1, j2));
                const auto slot = static_cast<std::size_t>(
                    std::find(ranked_j1.begin(), ranked_j1.end(), j2) - ranked_j1.begin());
                r.est_delay_ms.push_back(e.delay_ms[slot]);
                if (est->multi_objective()) {
                    r.est_capacity_mbps.push_back(e.capacity_mbps[slot]);
                    r.est_lifetime_min.push_back(e.lifetime_min[slot]);
                }
            }
            v.reports.push_back(std::move(r));
        }
    }
    return v;
}

namespace {

std::optional<int> argmin_candidate(const LocalView& v, const std::vector<double>& score) {
    int best = -1;
    double best_score = net::kInf;
    for (std::size_t i = 0; i < v.candidates.size(); ++i) {
        if (score[i] < best_score ||
            (score[i] == best_score && best >= 0 && v.candidates[i] < best)) {
            best = v.candidates[i];
            best_score = score[i];
        }
    }
    if (best < 0 || best_score >= kUnreachableMs) return std::nullopt;
    return best;
}

struct PenaltyConfig {
    double lambda = 0.0;
    double eps_c_mbps = 0.0;
    double eps_l_min = 0.0;

    double link_penalty_ms(const link::LinkMetrics& m) const {
        if (lambda == 0.0) return 0.0;
        return lambda * std::max(0.0, eps_c_mbps - units::to_mbps(m.capacity_bps)) +
               lambda * std::max(0.0, eps_l_min - units::to_min(m.lifetime_s));
    }
    double estimate_penalty_ms(double cap_mbps, double life_min) const {
        if (lambda == 0.0) return 0.0;
        return lambda * std::max(0.0, eps_c_mbps - cap_mbps) +
               lambda * std::max(0.0, eps_l_min - life_min);
    }
};

// Shared engine of the feedback rules; the single-objective variant is the
// zero-penalty special case.
std::optional<int> feedback_decision(const LocalView& v, const PenaltyConfig& pc,
                                     FeedbackTrace* trace) {
    if (v.candidates.empty()) return std::nullopt;
    const std::size_t nc = v.candidates.size();
    const bool mo = pc.lambda != 0.0;

    // penalized cost-to-go table, keyed by node; destination handled via
    // the indicator terms rather than stored
    std::unordered_map<int, double> dtilde;
    for (const auto& r : v.reports) {
        if (r.node < 0) continue;
        for (std::size_t i = 0; i < r.candidates.size(); ++i) {
            double e = r.est_delay_ms[i];
            if (mo) e += pc.estimate_penalty_ms(r.est_capacity_mbps[i], r.est_lifetime_min[i]);
            auto [it, inserted] = dtilde.emplace(r.candidates[i], e);
            if (!inserted) it->second = std::min(it->second, e);
        }
    }

    auto cost_to_go = [&](int node) -> double {
        if (node == v.dest) return 0.0;
        auto it = dtilde.find(node);
        return it == dtilde.end() ? net::kInf : it->second;
    };

    // first round: update each candidate through its own measured links
    std::vector<double> first(nc, net::kInf);
    for (std::size_t c = 0; c < nc; ++c) {
        const int j1 = v.candidates[c];
        if (j1 == v.dest) {
            first[c] = 0.0;
            continue;
        }
        const CandidateReport* r =
            c < v.reports.size() && v.reports[c].node == j1 ? &v.reports[c] : nullptr;
        if (!r) {
            // degraded mode: fall back to the forwarding node's own estimate
            std::cerr << "router: missing report for candidate " << j1
                      << ", using direct estimate\n";
            double e = v.self_est_delay_ms[c];
            if (mo)
                e += pc.estimate_penalty_ms(v.self_est_capacity_mbps[c],
                                            v.self_est_lifetime_min[c]);
            first[c] = e;
            continue;
        }
        for (std::size_t i = 0; i < r->candidates.size(); ++i) {
            const int j2 = r->candidates[i];
            double cost = units::to_ms(r->link[i].delay_s) + pc.link_penalty_ms(r->link[i]);
            if (j2 != v.dest) {
                double e = r->est_delay_ms[i];
                if (mo)
                    e += pc.estimate_penalty_ms(r->est_capacity_mbps[i],
                                                r->est_lifetime_min[i]);
                cost += e;
            }
            first[c] = std::min(first[c], cost);
        }
    }
    for (std::size_t c = 0; c < nc; ++c) dtilde[v.candidates[c]] = first[c];

    // mutual candidates sorted by first-round cost ascending
    std::vector<int> mutual;
    for (std::size_t c = 0; c < nc; ++c) {
        const int j = v.candidates[c];
        bool is_mutual = false;
        for (const auto& r : v.reports)
            if (r.node >= 0 &&
                std::find(r.candidates.begin(), r.candidates.end(), j) != r.candidates.end())
                is_mutual = true;
        if (is_mutual) mutual.push_back(j);
    }
    std::sort(mutual.begin(), mutual.end(), [&](int a, int b) {
        if (dtilde[a] != dtilde[b]) return dtilde[a] < dtilde[b];
        return a < b;
    });

    // recompute the mutual candidates in order, excluding mutual members
    // whose current estimate is higher than the one being recomputed
    for (int mk : mutual) {
        if (mk == v.dest) continue;
        const auto c = static_cast<std::size_t>(
            std::find(v.candidates.begin(), v.candidates.end(), mk) - v.candidates.begin());
        const CandidateReport* r =
            c < v.reports.size() && v.reports[c].node == mk ? &v.reports[c] : nullptr;
        if (!r) continue;
        const double own = dtilde[mk];
        double best = net::kInf;
        bool any = false;
        for (std::size_t i = 0; i < r->candidates.size(); ++i) {
            const int j2 = r->candidates[i];
            const bool in_mutual =
                std::find(mutual.begin(), mutual.end(), j2) != mutual.end();
            if (in_mutual && cost_to_go(j2) > own) continue;
            any = true;
            double cost = units::to_ms(r->link[i].delay_s) + pc.link_penalty_ms(r->link[i]);
            if (j2 != v.dest) cost += cost_to_go(j2);
            best = std::min(best, cost);
        }
        // an emptied candidate set keeps the first-round value
        if (any) dtilde[mk] = best;
    }

    std::vector<double> final_ms(nc), score(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        final_ms[c] = cost_to_go(v.candidates[c]);
        score[c] = units::to_ms(v.link[c].delay_s) + pc.link_penalty_ms(v.link[c]) +
                   final_ms[c];
    }
    if (trace) {
        trace->first_round_ms = first;
        trace->mutual_sorted = mutual;
        trace->final_ms = final_ms;
        trace->score_ms = score;
    }
    return argmin_candidate(v, score);
}

} // namespace

std::optional<int> greedy_next_hop(const LocalView& v) {
    int best = -1;
    double best_d = net::kInf;
    for (std::size_t i = 0; i < v.candidates.size(); ++i) {
        if (v.cand_dist_to_dest_km[i] < best_d ||
            (v.cand_dist_to_dest_km[i] == best_d && best >= 0 && v.candidates[i] < best)) {
            best = v.candidates[i];
            best_d = v.cand_dist_to_dest_km[i];
        }
    }
    if (best < 0 || best_d >= v.self_dist_to_dest_km) return std::nullopt;
    return best;
}

std::optional<int> glsr_next_hop(const LocalView& v) {
    int best = -1;
    double best_delay = net::kInf;
    for (std::size_t i = 0; i < v.candidates.size(); ++i) {
        if (v.cand_dist_to_dest_km[i] >= v.self_dist_to_dest_km) continue;
        const double d = v.link[i].delay_s;
        if (d < best_delay || (d == best_delay && best >= 0 && v.candidates[i] < best)) {
            best = v.candidates[i];
            best_delay = d;
        }
    }
    if (best < 0) return std::nullopt;
    return best;
}

std::optional<int> dl_next_hop_nofb(const LocalView& v) {
    if (v.candidates.empty()) return std::nullopt;
    if (v.self_est_delay_ms.size() != v.candidates.size())
        throw ConfigError("dl_next_hop_nofb: view lacks estimates");
    std::vector<double> score(v.candidates.size());
    for (std::size_t i = 0; i < v.candidates.size(); ++i) {
        score[i] = units::to_ms(v.link[i].delay_s);
        if (v.candidates[i] != v.dest) score[i] += v.self_est_delay_ms[i];
    }
    return argmin_candidate(v, score);
}

std::vector<int> mutual_candidate_set(const LocalView& v) {
    FeedbackTrace trace;
    feedback_decision(v, {}, &trace);
    return trace.mutual_sorted;
}

std::optional<int> dl_next_hop_fb(const LocalView& v, FeedbackTrace* trace) {
    return feedback_decision(v, {}, trace);
}

std::optional<int> dl_mo_next_hop(const LocalView& v, double eps_c_bps, double eps_l_s,
                                  double lambda, FeedbackTrace* trace) {
    PenaltyConfig pc;
    pc.lambda = lambda;
    pc.eps_c_mbps = units::to_mbps(eps_c_bps);
    pc.eps_l_min = units::to_min(eps_l_s);
    return feedback_decision(v, pc, trace);
}

} // namespace aanet::route
