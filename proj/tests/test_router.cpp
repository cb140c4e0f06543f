#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aanet/errors.hpp"
#include "aanet/router.hpp"
#include "aanet/units.hpp"
#include "testutil.hpp"

#include <algorithm>

using namespace aanet;
using namespace aanet::route;

namespace {

link::LinkMetrics lm(double delay_ms, double cap_mbps = 50.0, double life_min = 30.0) {
    return {units::from_ms(delay_ms), units::from_mbps(cap_mbps),
            units::from_min(life_min)};
}

// The worked 9-node feedback topology: forwarding node 1, candidates
// {2,3,4}, their candidate sets {5,6}, {4,7,8}, {3,8,9}, destination 10.
LocalView fig4_view() {
    LocalView v;
    v.self = 1;
    v.dest = 10;
    v.visited = {1};
    v.candidates = {2, 3, 4};
    v.link = {lm(12), lm(11), lm(13)};
    v.self_dist_to_dest_km = 1000;
    v.cand_dist_to_dest_km = {900, 800, 850};
    v.self_est_delay_ms = {999, 999, 999}; // only consulted in degraded mode

    CandidateReport r2;
    r2.node = 2;
    r2.candidates = {5, 6};
    r2.link = {lm(10), lm(11)};
    r2.est_delay_ms = {200, 250};

    CandidateReport r3;
    r3.node = 3;
    r3.candidates = {4, 7, 8};
    r3.link = {lm(12), lm(14), lm(13)};
    r3.est_delay_ms = {300, 180, 220};

    CandidateReport r4;
    r4.node = 4;
    r4.candidates = {3, 8, 9};
    r4.link = {lm(12), lm(15), lm(11)};
    r4.est_delay_ms = {280, 210, 400};

    v.reports = {r2, r3, r4};
    return v;
}

} // namespace

TEST_CASE("greedy: dest in candidates, void, argmin oracle") {
    LocalView v;
    v.self = 0;
    v.dest = 9;
    v.candidates = {9, 3};
    v.link = {lm(5), lm(4)};
    v.self_dist_to_dest_km = 500;
    v.cand_dist_to_dest_km = {0.0, 300.0};
    auto hop = greedy_next_hop(v);
    REQUIRE(hop.has_value());
    CHECK(*hop == 9);

    // all candidates farther than the forwarding node: communication void
    v.cand_dist_to_dest_km = {600.0, 550.0};
    CHECK_FALSE(greedy_next_hop(v).has_value());

    rng::Stream rs(rng::substream(61, "greedy"));
    for (int it = 0; it < 50; ++it) {
        LocalView rv;
        rv.self = 0;
        rv.dest = 99;
        rv.self_dist_to_dest_km = rs.uniform(200, 900);
        const int n = 1 + static_cast<int>(rs.next_u64() % 8);
        for (int i = 0; i < n; ++i) {
            rv.candidates.push_back(i + 1);
            rv.link.push_back(lm(rs.uniform(1, 20)));
            rv.cand_dist_to_dest_km.push_back(rs.uniform(50, 1200));
        }
        auto got = greedy_next_hop(rv);
        const auto it_min = std::min_element(rv.cand_dist_to_dest_km.begin(),
                                             rv.cand_dist_to_dest_km.end());
        if (*it_min < rv.self_dist_to_dest_km) {
            REQUIRE(got.has_value());
            CHECK(*got == rv.candidates[it_min - rv.cand_dist_to_dest_km.begin()]);
        } else {
            CHECK_FALSE(got.has_value());
        }
    }
}

TEST_CASE("glsr: min measured delay among strictly closer candidates") {
    LocalView v;
    v.self = 0;
    v.dest = 9;
    v.candidates = {1, 2, 3};
    v.link = {lm(10), lm(3), lm(2)};
    v.self_dist_to_dest_km = 500;
    v.cand_dist_to_dest_km = {400, 450, 700}; // 3 is farther, excluded
    auto hop = glsr_next_hop(v);
    REQUIRE(hop.has_value());
    CHECK(*hop == 2);

    // single closer candidate
    v.cand_dist_to_dest_km = {400, 600, 700};
    CHECK(*glsr_next_hop(v) == 1);

    // never selects a candidate farther from the destination
    rng::Stream rs(rng::substream(62, "glsr"));
    for (int it = 0; it < 50; ++it) {
        LocalView rv;
        rv.self = 0;
        rv.dest = 99;
        rv.self_dist_to_dest_km = rs.uniform(200, 900);
        const int n = 1 + static_cast<int>(rs.next_u64() % 8);
        for (int i = 0; i < n; ++i) {
            rv.candidates.push_back(i + 1);
            rv.link.push_back(lm(rs.uniform(1, 20)));
            rv.cand_dist_to_dest_km.push_back(rs.uniform(50, 1200));
        }
        auto got = glsr_next_hop(rv);
        if (got) {
            const auto idx = static_cast<std::size_t>(
                std::find(rv.candidates.begin(), rv.candidates.end(), *got) -
                rv.candidates.begin());
            CHECK(rv.cand_dist_to_dest_km[idx] < rv.self_dist_to_dest_km);
        }
    }
}

TEST_CASE("dl_next_hop_nofb: destination zeroing and empty candidates") {
    LocalView v;
    v.self = 0;
    v.dest = 9;
    v.candidates = {9, 5};
    v.link = {lm(8), lm(1)};
    v.self_est_delay_ms = {123456.0, 500.0}; // dest slot estimate is ignored
    v.cand_dist_to_dest_km = {0, 100};
    v.self_dist_to_dest_km = 200;
    auto hop = dl_next_hop_nofb(v);
    REQUIRE(hop.has_value());
    CHECK(*hop == 9); // 8 ms beats 1 + 500 ms

    LocalView empty;
    empty.self = 0;
    empty.dest = 9;
    CHECK_FALSE(dl_next_hop_nofb(empty).has_value());

    // every estimate at the sentinel: no usable route
    LocalView stuck;
    stuck.self = 0;
    stuck.dest = 9;
    stuck.candidates = {1, 2};
    stuck.link = {lm(5), lm(6)};
    stuck.self_est_delay_ms = {data::kLabelSentinel, data::kLabelSentinel};
    CHECK_FALSE(dl_next_hop_nofb(stuck).has_value());
}

TEST_CASE("dl_next_hop_nofb tracks the optimal-substructure argmin with oracle costs") {
    for (int it = 0; it < 25; ++it) {
        auto g = testutil::random_geo_graph(7000 + it, 16, 8.0);
        SoOracleEstimator oracle(g);
        const auto apsp = net::floyd_warshall_constrained(g, 0.0, 0.0);
        const int dest = g.size() - 1;
        for (int self = 0; self < g.size() - 1; ++self) {
            auto view = build_view(g, self, dest, {self}, g.size(), &oracle, false);
            if (view.candidates.empty()) continue;
            auto hop = dl_next_hop_nofb(view);

            // direct argmin over all neighbors from global information
            int best = -1;
            double best_cost = net::kInf;
            for (int j : g.out_neighbors(self)) {
                double cost = g.edge(self, j)->delay_s;
                if (j != dest) cost += apsp.d(j, dest);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = j;
                }
            }
            if (best_cost >= net::kInf || best_cost > units::from_ms(kUnreachableMs)) {
                CHECK_FALSE(hop.has_value());
            } else {
                REQUIRE(hop.has_value());
                CHECK(*hop == best);
            }
        }
    }
}

TEST_CASE("mutual_candidate_set: worked topology and set-intersection oracle") {
    auto v = fig4_view();
    CHECK(mutual_candidate_set(v) == std::vector<int>{3, 4});

    // no overlap: empty mutual set
    LocalView no;
    no.self = 1;
    no.dest = 10;
    no.candidates = {2, 3};
    no.link = {lm(10), lm(11)};
    no.self_est_delay_ms = {1, 1};
    CandidateReport a;
    a.node = 2;
    a.candidates = {5};
    a.link = {lm(9)};
    a.est_delay_ms = {100};
    CandidateReport b;
    b.node = 3;
    b.candidates = {6};
    b.link = {lm(9)};
    b.est_delay_ms = {100};
    no.reports = {a, b};
    CHECK(mutual_candidate_set(no).empty());

    // membership matches a direct set-intersection recomputation
    rng::Stream rs(rng::substream(63, "mutual"));
    for (int it = 0; it < 30; ++it) {
        auto g = testutil::random_geo_graph(7100 + it, 12, 7.0);
        SoOracleEstimator oracle(g);
        const int dest = g.size() - 1;
        for (int self = 0; self < g.size() - 1; ++self) {
            auto view = build_view(g, self, dest, {self}, 5, &oracle, true);
            auto got = mutual_candidate_set(view);
            std::vector<int> expect;
            for (int j : view.candidates) {
                bool in_some = false;
                for (const auto& r : view.reports)
                    in_some |= std::find(r.candidates.begin(), r.candidates.end(), j) !=
                               r.candidates.end();
                if (in_some) expect.push_back(j);
            }
            auto sorted_got = got;
            std::sort(sorted_got.begin(), sorted_got.end());
            std::sort(expect.begin(), expect.end());
            CHECK(sorted_got == expect);
        }
    }
}

TEST_CASE("dl_next_hop_fb: hand trace of the worked topology") {
    auto v = fig4_view();
    FeedbackTrace t;
    auto hop = dl_next_hop_fb(v, &t);
    REQUIRE(hop.has_value());

    CHECK(t.first_round_ms[0] == doctest::Approx(210.0));
    CHECK(t.first_round_ms[1] == doctest::Approx(194.0));
    CHECK(t.first_round_ms[2] == doctest::Approx(225.0));
    CHECK(t.mutual_sorted == std::vector<int>{3, 4});
    // node 3 recomputed without node 4, node 4 afterwards through node 3
    CHECK(t.final_ms[1] == doctest::Approx(194.0));
    CHECK(t.final_ms[2] == doctest::Approx(206.0));
    CHECK(t.score_ms[0] == doctest::Approx(222.0));
    CHECK(t.score_ms[1] == doctest::Approx(205.0));
    CHECK(t.score_ms[2] == doctest::Approx(219.0));
    CHECK(*hop == 3);
}

TEST_CASE("dl_next_hop_fb: single candidate whose only next-2-hop is the destination") {
    LocalView v;
    v.self = 1;
    v.dest = 10;
    v.candidates = {2};
    v.link = {lm(12)};
    v.self_est_delay_ms = {777};
    CandidateReport r;
    r.node = 2;
    r.candidates = {10};
    r.link = {lm(20)};
    r.est_delay_ms = {500}; // ignored: the 2-hop is the destination
    v.reports = {r};

    FeedbackTrace t;
    auto hop = dl_next_hop_fb(v, &t);
    REQUIRE(hop.has_value());
    CHECK(*hop == 2);
    CHECK(t.final_ms[0] == doctest::Approx(20.0));
    CHECK(t.score_ms[0] == doctest::Approx(32.0));
}

TEST_CASE("dl_next_hop_fb: missing report degrades to the direct estimate") {
    auto v = fig4_view();
    v.reports[1].node = -1; // node 3's report lost
    v.self_est_delay_ms = {999, 150, 999};
    FeedbackTrace t;
    auto hop = dl_next_hop_fb(v, &t);
    REQUIRE(hop.has_value());
    CHECK(t.first_round_ms[1] == doctest::Approx(150.0));
    CHECK(*hop == 3); // 11 + 150 still wins
}

TEST_CASE("fb and nofb agree with the true optimal hop under oracle estimates") {
    for (int it = 0; it < 15; ++it) {
        auto g = testutil::random_geo_graph(7200 + it, 14, 7.5);
        SoOracleEstimator oracle(g);
        const auto apsp = net::floyd_warshall_constrained(g, 0.0, 0.0);
        const int dest = g.size() - 1;
        for (int self = 0; self < g.size() - 1; ++self) {
            if (apsp.d(self, dest) == net::kInf) continue;
            auto vn = build_view(g, self, dest, {self}, g.size(), &oracle, false);
            auto vf = build_view(g, self, dest, {self}, g.size(), &oracle, true);
            auto hn = dl_next_hop_nofb(vn);
            auto hf = dl_next_hop_fb(vf);
            REQUIRE(hn.has_value());
            REQUIRE(hf.has_value());
            // both reproduce the optimal next hop on the true shortest path
            double best_cost = net::kInf;
            int best = -1;
            for (int j : g.out_neighbors(self)) {
                double cost = g.edge(self, j)->delay_s;
                if (j != dest) cost += apsp.d(j, dest);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = j;
                }
            }
            CHECK(*hn == best);
            CHECK(*hf == best);
        }
    }
}

TEST_CASE("dl_mo_next_hop: zero penalties reduce to the feedback scorer") {
    auto v = fig4_view();
    // attach comfortable capacities and lifetimes everywhere
    for (auto& m : v.link) {
        m.capacity_bps = units::from_mbps(45.0);
        m.lifetime_s = units::from_min(25.0);
    }
    v.self_est_capacity_mbps = {40, 40, 40};
    v.self_est_lifetime_min = {20, 20, 20};
    for (auto& r : v.reports) {
        for (auto& m : r.link) {
            m.capacity_bps = units::from_mbps(45.0);
            m.lifetime_s = units::from_min(25.0);
        }
        r.est_capacity_mbps.assign(r.candidates.size(), 40.0);
        r.est_lifetime_min.assign(r.candidates.size(), 20.0);
    }

    FeedbackTrace so, mo;
    auto h1 = dl_next_hop_fb(v, &so);
    auto h2 = dl_mo_next_hop(v, units::from_mbps(20.0), units::from_min(10.0), 10.0, &mo);
    REQUIRE(h1.has_value());
    REQUIRE(h2.has_value());
    CHECK(*h1 == *h2);
    for (std::size_t i = 0; i < so.score_ms.size(); ++i)
        CHECK(mo.score_ms[i] == doctest::Approx(so.score_ms[i]).epsilon(1e-12));
}

TEST_CASE("dl_mo_next_hop: a 10 Mbps capacity violation adds 100 delay units") {
    auto base = [] {
        LocalView v;
        v.self = 1;
        v.dest = 10;
        v.candidates = {2};
        v.link = {lm(12, 30.0, 25.0)};
        v.self_est_delay_ms = {0};
        v.self_est_capacity_mbps = {30};
        v.self_est_lifetime_min = {25};
        CandidateReport r;
        r.node = 2;
        r.candidates = {10};
        r.link = {lm(20, 30.0, 25.0)};
        r.est_delay_ms = {0};
        r.est_capacity_mbps = {30};
        r.est_lifetime_min = {25};
        v.reports = {r};
        return v;
    };

    FeedbackTrace ok;
    auto v1 = base();
    dl_mo_next_hop(v1, units::from_mbps(20.0), units::from_min(10.0), 10.0, &ok);

    auto v2 = base();
    v2.link[0].capacity_bps = units::from_mbps(10.0); // violates by 10 Mbps
    FeedbackTrace bad;
    dl_mo_next_hop(v2, units::from_mbps(20.0), units::from_min(10.0), 10.0, &bad);

    CHECK(bad.score_ms[0] - ok.score_ms[0] == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("no policy returns a visited node") {
    rng::Stream rs(rng::substream(64, "loops"));
    for (int it = 0; it < 20; ++it) {
        auto g = testutil::random_geo_graph(7300 + it, 14, 7.0);
        SoOracleEstimator oracle(g);
        const int dest = g.size() - 1;
        for (int self = 0; self < g.size() - 1; ++self) {
            std::vector<int> visited{self};
            for (int v = 0; v < g.size() - 1; ++v)
                if (v != self && rs.uniform() < 0.3) visited.push_back(v);
            auto view = build_view(g, self, dest, visited, 6, &oracle, true);
            for (int j : view.candidates)
                CHECK(std::find(visited.begin(), visited.end(), j) == visited.end());

            auto check = [&](std::optional<int> hop) {
                if (!hop) return;
                CHECK(std::find(visited.begin(), visited.end(), *hop) == visited.end());
                CHECK(std::find(view.candidates.begin(), view.candidates.end(), *hop) !=
                      view.candidates.end());
            };
            check(greedy_next_hop(view));
            check(glsr_next_hop(view));
            check(dl_next_hop_nofb(view));
            check(dl_next_hop_fb(view));
        }
    }
}

TEST_CASE("MLPEstimator validates dimensions against K") {
    auto params = nn::init(nn::so_spec(10), 1);
    CHECK_THROWS_AS(MLPEstimator(params, 7, data::DatasetKind::SO), ConfigError);
    CHECK_NOTHROW(MLPEstimator(params, 10, data::DatasetKind::SO));
    CHECK_THROWS_AS(MLPEstimator(params, 10, data::DatasetKind::MO), ConfigError);

    auto mo_params = nn::init(nn::mo_spec(5), 1);
    CHECK_NOTHROW(MLPEstimator(mo_params, 5, data::DatasetKind::MO));
}
