#pragma once

#include "aanet/datasetgen.hpp"
#include "aanet/netgraph.hpp"
#include "aanet/neural.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace aanet::route {

// Cost-to-go estimates for a node's ranked neighbors, in label units
// (ms / Mbps / min).  capacity/lifetime are filled by multi-objective
// estimators only.
struct SlotEstimates {
    std::vector<double> delay_ms;
    std::vector<double> capacity_mbps;
    std::vector<double> lifetime_min;
};

class Estimator {
public:
    virtual ~Estimator() = default;
    virtual bool multi_objective() const = 0;
    virtual SlotEstimates estimate(const net::LinkGraph& g, int node,
                                   const std::vector<int>& ranked, int dest,
                                   double eps_c_bps, double eps_l_s) const = 0;
};

// DNN-backed estimator; feature assembly mirrors dataset generation.
class MLPEstimator : public Estimator {
public:
    MLPEstimator(nn::MLPParams params, int K, data::DatasetKind kind);
    bool multi_objective() const override { return kind_ == data::DatasetKind::MO; }
    SlotEstimates estimate(const net::LinkGraph& g, int node,
                           const std::vector<int>& ranked, int dest, double eps_c_bps,
                           double eps_l_s) const override;
    int K() const { return k_; }

private:
    nn::MLPParams params_;
    int k_ = 0;
    data::DatasetKind kind_;
};

// Perfect single-objective estimator: true minimum delays on the frozen
// graph (test stub standing in for an ideally trained DNN).
class SoOracleEstimator : public Estimator {
public:
    explicit SoOracleEstimator(const net::LinkGraph& g);
    bool multi_objective() const override { return false; }
    SlotEstimates estimate(const net::LinkGraph& g, int node,
                           const std::vector<int>& ranked, int dest, double eps_c_bps,
                           double eps_l_s) const override;

private:
    net::APSPResult apsp_;
};

// Perfect multi-objective estimator: the label tables of the threshold
// sweep on the frozen graph (thresholds snapped to the grid).
class MoOracleEstimator : public Estimator {
public:
    MoOracleEstimator(const net::LinkGraph& g, int dest, const data::EpsGrid& grid);
    bool multi_objective() const override { return true; }
    SlotEstimates estimate(const net::LinkGraph& g, int node,
                           const std::vector<int>& ranked, int dest, double eps_c_bps,
                           double eps_l_s) const override;

private:
    data::MoLabelTables tables_;
    data::EpsGrid grid_;
    int dest_;
};

// Next-2-hop report of one candidate: its own loop-excluded candidate set,
// the measured link metrics toward them, and its DNN outputs.
struct CandidateReport {
    int node = -1; // -1 marks a missing report (degraded mode)
    std::vector<int> candidates;
    std::vector<link::LinkMetrics> link;
    std::vector<double> est_delay_ms;
    std::vector<double> est_capacity_mbps;
    std::vector<double> est_lifetime_min;
};

// Everything the forwarding node can see when choosing the next hop.
// Candidate-aligned vectors follow the destination-distance ranking; node
// index order doubles as the deterministic tie-break.
struct LocalView {
    int self = -1;
    int dest = -1;
    std::vector<int> visited; // path prefix including self
    std::vector<int> candidates;
    std::vector<link::LinkMetrics> link; // self -> candidate
    double self_dist_to_dest_km = 0.0;
    std::vector<double> cand_dist_to_dest_km;
    std::vector<double> self_est_delay_ms;
    std::vector<double> self_est_capacity_mbps;
    std::vector<double> self_est_lifetime_min;
    std::vector<CandidateReport> reports; // aligned with candidates when present
};

// Scores at or above this value mean "no usable route" (the label sentinel
// propagated through the optimal-substructure sums).
inline constexpr double kUnreachableMs = data::kLabelSentinel / 2.0;

LocalView build_view(const net::LinkGraph& g, int self, int dest,
                     const std::vector<int>& visited, int K, const Estimator* est,
                     bool with_reports, double eps_c_bps = 0.0, double eps_l_s = 0.0);

// Forward to the strictly closer candidate nearest to the destination;
// empty on a communication void.
std::optional<int> greedy_next_hop(const LocalView& v);

// Among strictly closer candidates, minimize the measured one-hop delay.
std::optional<int> glsr_next_hop(const LocalView& v);

// One inference at the forwarding node: argmin of link delay plus estimated
// cost to go.
std::optional<int> dl_next_hop_nofb(const LocalView& v);

// Candidates that are simultaneously next-2-hop candidates, sorted by their
// first-round estimated delay ascending.
std::vector<int> mutual_candidate_set(const LocalView& v);

struct FeedbackTrace {
    std::vector<double> first_round_ms; // aligned with candidates
    std::vector<int> mutual_sorted;
    std::vector<double> final_ms;    // cost to go after recomputation
    std::vector<double> score_ms;    // final per-candidate scores
};

// Feedback rule: initialize cost-to-go from the reported estimates, update
// each candidate through its own measured links, then recompute the mutual
// candidates in ascending order to decouple their interdependence.
std::optional<int> dl_next_hop_fb(const LocalView& v, FeedbackTrace* trace = nullptr);

// Feedback rule with penalty terms lambda*[eps - metric]+ on both measured
// links and estimated cost-to-go.
std::optional<int> dl_mo_next_hop(const LocalView& v, double eps_c_bps, double eps_l_s,
                                  double lambda = 10.0, FeedbackTrace* trace = nullptr);

} // namespace aanet::route
