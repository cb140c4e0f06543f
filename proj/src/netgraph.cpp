#include "aanet/netgraph.hpp"

#include "aanet/errors.hpp"
#include "aanet/rng.hpp"

#include <algorithm>
#include <queue>

namespace aanet::net {

LinkGraph::LinkGraph(double ts_s, std::vector<flight::NodeState> nodes)
    : ts_s_(ts_s), nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    metrics_.resize(n * n);
    present_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!index_.emplace(nodes_[i].id, static_cast<int>(i)).second)
            throw DataError("duplicate node id '" + nodes_[i].id + "' in snapshot");
    }
}

int LinkGraph::index_of(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

void LinkGraph::set_edge(int i, int j, const link::LinkMetrics& m) {
    if (i == j) throw DataError("self edges are not allowed");
    const std::size_t k = static_cast<std::size_t>(i) * nodes_.size() + j;
    metrics_[k] = m;
    present_[k] = 1;
}

const link::LinkMetrics* LinkGraph::edge(int i, int j) const {
    const std::size_t k = static_cast<std::size_t>(i) * nodes_.size() + j;
    return present_[k] ? &metrics_[k] : nullptr;
}

std::vector<int> LinkGraph::out_neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < size(); ++j)
        if (j != i && has_edge(i, j)) out.push_back(j);
    return out;
}

LifetimeProvider zero_lifetimes() {
    return [](const flight::NodeState&, const flight::NodeState&, double) { return 0.0; };
}

LifetimeProvider scenario_lifetimes(const flight::Scenario& s, link::LifetimeParams lp) {
    // id -> position track, resolved once
    auto tracks = std::make_shared<std::unordered_map<std::string, link::PositionFn>>();
    for (const auto& t : s.flights) {
        const auto* traj = &t;
        (*tracks)[t.flight_id] = [traj](double ts) -> std::optional<geo::GeoPos> {
            auto n = flight::position_at(*traj, ts);
            if (!n) return std::nullopt;
            return n->pos;
        };
    }
    for (const auto& g : s.ground_stations) (*tracks)[g.id] = link::fixed_track(g.pos);

    return [tracks, lp](const flight::NodeState& a, const flight::NodeState& b,
                        double ts) -> double {
        auto ia = tracks->find(a.id);
        auto ib = tracks->find(b.id);
        if (ia == tracks->end() || ib == tracks->end())
            throw DataError("lifetime provider: unknown node id");
        return link::link_lifetime_s(ia->second, ib->second, ts, lp);
    };
}

LinkGraph build_graph(const flight::Snapshot& snap, const link::QueueModel& qm,
                      const link::RadioParams& rp, const LifetimeProvider& lifetimes,
                      std::uint64_t seed) {
    if (snap.nodes.empty()) throw DataError("build_graph: empty snapshot");
    LinkGraph g(snap.ts_s, snap.nodes);
    const int n = g.size();

    std::vector<double> queue_s(n);
    for (int i = 0; i < n; ++i)
        queue_s[i] = link::sample_queue_delay(
            qm, rng::substream(seed, "queue", static_cast<std::uint64_t>(i)));

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& a = g.node(i);
            const auto& b = g.node(j);
            if (!geo::visible(a.pos, b.pos)) continue;
            link::LinkMetrics m;
            const double d_km = std::max(geo::distance_km(a.pos, b.pos), 1e-3);
            m.capacity_bps = link::link_capacity_bps(d_km, rp);
            m.delay_s = queue_s[i] + rp.packet_bits / m.capacity_bps +
                        d_km * 1000.0 / rp.light_speed_mps;
            m.lifetime_s = (j > i || !g.edge(j, i)) ? lifetimes(a, b, snap.ts_s)
                                                    : g.edge(j, i)->lifetime_s;
            g.set_edge(i, j, m);
        }
    }
    return g;
}

std::vector<int> neighbors_ranked(const LinkGraph& g, int i, int dest, int K) {
    if (i < 0 || i >= g.size() || dest < 0 || dest >= g.size())
        throw DataError("neighbors_ranked: unknown node");
    std::vector<int> nb = g.out_neighbors(i);
    const auto& dpos = g.node(dest).pos;
    std::vector<double> dist(nb.size());
    for (std::size_t k = 0; k < nb.size(); ++k)
        dist[k] = geo::distance_km(g.node(nb[k]).pos, dpos);
    std::vector<std::size_t> order(nb.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return g.node(nb[a]).id < g.node(nb[b]).id;
    });
    std::vector<int> out;
    for (std::size_t k = 0; k < order.size() && static_cast<int>(k) < K; ++k)
        out.push_back(nb[order[k]]);
    return out;
}

std::optional<Path> dijkstra_min_delay(const LinkGraph& g, int src, int dst) {
    const int n = g.size();
    if (src < 0 || src >= n || dst < 0 || dst >= n)
        throw DataError("dijkstra: unknown node");
    std::vector<double> dist(n, kInf);
    std::vector<int> prev(n, -1);
    std::vector<char> done(n, 0);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (u == dst) break;
        for (int v = 0; v < n; ++v) {
            const auto* e = g.edge(u, v);
            if (!e || done[v]) continue;
            const double nd = d + e->delay_s;
            if (nd < dist[v]) {
                dist[v] = nd;
                prev[v] = u;
                pq.emplace(nd, v);
            }
        }
    }
    if (dist[dst] == kInf) return std::nullopt;
    Path p;
    for (int v = dst; v != -1; v = prev[v]) p.nodes.push_back(v);
    std::reverse(p.nodes.begin(), p.nodes.end());
    return p;
}

APSPResult floyd_warshall_constrained(const LinkGraph& g, double eps_c_bps,
                                      double eps_l_s, ThresholdMode mode_c,
                                      ThresholdMode mode_l) {
    const int n = g.size();
    APSPResult r;
    r.n = n;
    r.dist.assign(static_cast<std::size_t>(n) * n, kInf);
    r.next.assign(static_cast<std::size_t>(n) * n, -1);
    auto D = [&](int i, int j) -> double& {
        return r.dist[static_cast<std::size_t>(i) * n + j];
    };
    auto N = [&](int i, int j) -> int& {
        return r.next[static_cast<std::size_t>(i) * n + j];
    };

    const bool strict_c = mode_c == ThresholdMode::Exclusive;
    const bool strict_l = mode_l == ThresholdMode::Exclusive;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto* e = g.edge(i, j);
            if (!e) continue;
            const bool ok =
                (strict_c ? e->capacity_bps > eps_c_bps : e->capacity_bps >= eps_c_bps) &&
                (strict_l ? e->lifetime_s > eps_l_s : e->lifetime_s >= eps_l_s);
            if (ok) {
                D(i, j) = e->delay_s;
                N(i, j) = j;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        N(i, i) = i;
    }
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            const double dik = D(i, k);
            if (dik == kInf) continue;
            for (int j = 0; j < n; ++j) {
                const double cand = dik + D(k, j);
                if (D(i, j) > cand) {
                    D(i, j) = cand;
                    N(i, j) = N(i, k);
                }
            }
        }
    }
    return r;
}

std::optional<Path> extract_path(const APSPResult& r, int src, int dst) {
    if (r.nxt(src, dst) == -1) return std::nullopt;
    Path p;
    p.nodes.push_back(src);
    int cur = src;
    int guard = 0;
    while (cur != dst) {
        cur = r.nxt(cur, dst);
        if (cur == -1 || ++guard > r.n)
            throw std::logic_error("extract_path: inconsistent next pointers");
        p.nodes.push_back(cur);
    }
    return p;
}

PathMetrics path_metrics(const LinkGraph& g, const Path& p) {
    PathMetrics m;
    for (std::size_t k = 0; k + 1 < p.nodes.size(); ++k) {
        const auto* e = g.edge(p.nodes[k], p.nodes[k + 1]);
        if (!e)
            throw DataError("path_metrics: missing edge " +
                            g.node(p.nodes[k]).id + " -> " + g.node(p.nodes[k + 1]).id);
        m.delay_s += e->delay_s;
        m.capacity_bps = std::min(m.capacity_bps, e->capacity_bps);
        m.lifetime_s = std::min(m.lifetime_s, e->lifetime_s);
    }
    return m;
}

} // namespace aanet::net
