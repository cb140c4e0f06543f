#pragma once

#include "aanet/datasetgen.hpp"
#include "aanet/netgraph.hpp"
#include "aanet/router.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace aanet::sim {

enum class RouteStatus { Delivered, VoidFailure, HopLimit, NoCandidates };
const char* to_string(RouteStatus s);

struct RouteOutcome {
    RouteStatus status = RouteStatus::NoCandidates;
    net::Path path;           // nodes walked, starting at the source
    net::PathMetrics metrics; // meaningful when Delivered
    int hops = 0;
};

struct Policy {
    enum class Kind { Optimal, Greedy, Glsr, DlNofb, DlFb, DlMo };
    Kind kind = Kind::Greedy;
    const route::Estimator* estimator = nullptr; // Dl* policies
    double eps_c_bps = 0.0, eps_l_s = 0.0;       // DlMo
    double lambda = 10.0;

    static Policy optimal() { return {Kind::Optimal, nullptr, 0, 0, 10.0}; }
    static Policy greedy() { return {Kind::Greedy, nullptr, 0, 0, 10.0}; }
    static Policy glsr() { return {Kind::Glsr, nullptr, 0, 0, 10.0}; }
    static Policy dl_nofb(const route::Estimator* e) { return {Kind::DlNofb, e, 0, 0, 10.0}; }
    static Policy dl_fb(const route::Estimator* e) { return {Kind::DlFb, e, 0, 0, 10.0}; }
    static Policy dl_mo(const route::Estimator* e, double eps_c_bps, double eps_l_s,
                        double lambda = 10.0) {
        return {Kind::DlMo, e, eps_c_bps, eps_l_s, lambda};
    }
};
const char* to_string(Policy::Kind k);

// Per-hop decisions over a frozen graph; the topology does not change while
// one packet is in flight.
RouteOutcome route_on_graph(const net::LinkGraph& g, int src, int dst, const Policy& p,
                            int K, int hop_limit = 100);

struct SimConfig {
    link::RadioParams rp = link::paper_ku_band();
    link::QueueModel queue = link::QueueModel::trunc_gaussian(0.010, 0.005, 0.001);
    bool lifetimes = false; // attach real link lifetimes (needed by DlMo)
    link::LifetimeParams lifetime_params;
    int K = 10;
    int hop_limit = 100;
    std::uint64_t seed = 0;
    int threads = 1;
};

// Queuing delays are drawn once per node per packet (stream derived from
// the config seed, timestamp and source), so all policies evaluated on the
// same packet see identical link delays.
RouteOutcome route_packet(const flight::Scenario& sc, double ts, const std::string& src,
                          const std::string& dst, const Policy& p, const SimConfig& cfg);

struct PacketResult {
    double ts = 0.0;
    std::string src;
    RouteOutcome outcome;
};

struct EvalReport {
    std::string policy;
    std::vector<PacketResult> results;

    std::size_t delivered() const;
    double mean_delay_s() const; // over delivered packets
    // fraction of all packets delivered below the threshold
    double success_prob(double threshold_s = 0.2) const;
    // nondecreasing (delay_ms, fraction of all packets) points
    std::vector<std::pair<double, double>> delay_cdf() const;
};

// One packet from every airborne flight per timestamp.
EvalReport eval_policy(const flight::Scenario& sc, const std::vector<double>& timestamps,
                       const std::string& dst, const Policy& p, const SimConfig& cfg);

// columns: policy, ts, src, status, delay_ms, capacity_mbps, lifetime_min, hops
void write_eval_csv(std::ostream& out, const EvalReport& r);
// columns: delay_ms, cdf
void write_cdf_csv(std::ostream& out, const EvalReport& r);

struct SweepEntry {
    double eps_c_bps = 0.0, eps_l_s = 0.0;
    RouteOutcome outcome;
};

// Routes one packet per grid cell with the penalized policy and merges
// entries that realized the same path.
std::vector<SweepEntry> mo_sweep_on_graph(const net::LinkGraph& g, int src, int dst,
                                          const route::Estimator& est,
                                          const data::EpsGrid& grid, double lambda,
                                          int K, int hop_limit = 100);
std::vector<SweepEntry> mo_sweep(const flight::Scenario& sc, double ts,
                                 const std::string& src, const std::string& dst,
                                 const route::Estimator& est, const data::EpsGrid& grid,
                                 double lambda, const SimConfig& cfg);

} // namespace aanet::sim
