#pragma once

#include "aanet/flightdata.hpp"
#include "aanet/linkmodel.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace aanet::net {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense weighted digraph over one snapshot.  An edge i->j exists iff the
// pair is visible; its delay carries the tail node's queuing delay.
class LinkGraph {
public:
    LinkGraph() = default;
    LinkGraph(double ts_s, std::vector<flight::NodeState> nodes);

    int size() const { return static_cast<int>(nodes_.size()); }
    double ts() const { return ts_s_; }
    const flight::NodeState& node(int i) const { return nodes_.at(i); }
    const std::vector<flight::NodeState>& nodes() const { return nodes_; }
    int index_of(const std::string& id) const; // -1 when absent

    void set_edge(int i, int j, const link::LinkMetrics& m);
    const link::LinkMetrics* edge(int i, int j) const;
    bool has_edge(int i, int j) const { return edge(i, j) != nullptr; }

    std::vector<int> out_neighbors(int i) const;

private:
    double ts_s_ = 0.0;
    std::vector<flight::NodeState> nodes_;
    std::vector<link::LinkMetrics> metrics_;
    std::vector<std::uint8_t> present_;
    std::unordered_map<std::string, int> index_;
};

// Lifetime of the (tail, head) link starting at ts; zero_lifetimes() skips
// the (comparatively expensive) computation for single-objective flows.
using LifetimeProvider = std::function<double(
    const flight::NodeState& tail, const flight::NodeState& head, double ts_s)>;

LifetimeProvider zero_lifetimes();
LifetimeProvider scenario_lifetimes(const flight::Scenario& s,
                                    link::LifetimeParams lp = {});

// Edges for all visible ordered pairs; queuing delays sampled per node from
// qm (stream derived from seed and node order), so the result is
// deterministic for a fixed seed.
LinkGraph build_graph(const flight::Snapshot& snap, const link::QueueModel& qm,
                      const link::RadioParams& rp, const LifetimeProvider& lifetimes,
                      std::uint64_t seed);

// Neighbors of i sorted by geographic distance to dest ascending (ties by
// node id), truncated to the top K.
std::vector<int> neighbors_ranked(const LinkGraph& g, int i, int dest, int K);

struct Path {
    std::vector<int> nodes;
    int hops() const { return static_cast<int>(nodes.size()) - 1; }
};

struct PathMetrics {
    double delay_s = 0.0;
    double capacity_bps = kInf;
    double lifetime_s = kInf;
};

std::optional<Path> dijkstra_min_delay(const LinkGraph& g, int src, int dst);

struct APSPResult {
    int n = 0;
    std::vector<double> dist; // n*n, kInf when unreachable
    std::vector<int> next;    // n*n, -1 when no path

    double d(int i, int j) const { return dist[static_cast<std::size_t>(i) * n + j]; }
    int nxt(int i, int j) const { return next[static_cast<std::size_t>(i) * n + j]; }
};

// Edge filters of the epsilon-constrained shortest-path solve.  Inclusive
// keeps edges with metric >= threshold; Exclusive demands strictly greater
// (used by the Pareto sweep to advance past an already-found solution).
enum class ThresholdMode { Inclusive, Exclusive };

// All-pairs minimum delay where only edges with capacity/lifetime meeting
// the thresholds participate.
APSPResult floyd_warshall_constrained(const LinkGraph& g, double eps_c_bps,
                                      double eps_l_s,
                                      ThresholdMode mode_c = ThresholdMode::Inclusive,
                                      ThresholdMode mode_l = ThresholdMode::Inclusive);

std::optional<Path> extract_path(const APSPResult& r, int src, int dst);

// (sum of delays, min capacity, min lifetime); throws DataError when the
// path uses a missing edge.
PathMetrics path_metrics(const LinkGraph& g, const Path& p);

} // namespace aanet::net
