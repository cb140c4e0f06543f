#include "aanet/datasetgen.hpp"

#include "aanet/errors.hpp"
#include "aanet/parallel.hpp"
#include "aanet/rng.hpp"
#include "aanet/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>

namespace aanet::data {

nn::Matrix Dataset::features() const {
    nn::Matrix m(static_cast<int>(count()), x_dim);
    m.a = x;
    return m;
}

nn::Matrix Dataset::labels() const {
    nn::Matrix m(static_cast<int>(count()), y_dim);
    m.a = y;
    return m;
}

int so_feature_dim(int K) { return 3 * (K + 2); }
int mo_feature_dim(int K) { return 5 * (K + 2) + 2; }
int so_label_dim(int K) { return K; }
int mo_label_dim(int K) { return 3 * K; }

namespace {

void push_pos(std::vector<double>& x, const flight::NodeState& n) {
    x.push_back(n.pos.lat_deg);
    x.push_back(n.pos.lon_deg);
    x.push_back(n.pos.alt_km);
}

void push_state(std::vector<double>& x, const flight::NodeState& n) {
    push_pos(x, n);
    x.push_back(n.speed_mps);
    x.push_back(n.heading_deg);
}

} // namespace

std::vector<double> so_features(const net::LinkGraph& g, int node,
                                const std::vector<int>& ranked, int dest, int K) {
    std::vector<double> x;
    x.reserve(so_feature_dim(K));
    push_pos(x, g.node(node));
    for (int k = 0; k < K; ++k) {
        if (k < static_cast<int>(ranked.size()))
            push_pos(x, g.node(ranked[k]));
        else
            x.insert(x.end(), {0.0, 0.0, 0.0});
    }
    push_pos(x, g.node(dest));
    return x;
}

std::vector<double> mo_features(const net::LinkGraph& g, int node,
                                const std::vector<int>& ranked, int dest, int K,
                                double eps_c_bps, double eps_l_s) {
    std::vector<double> x;
    x.reserve(mo_feature_dim(K));
    push_state(x, g.node(node));
    for (int k = 0; k < K; ++k) {
        if (k < static_cast<int>(ranked.size()))
            push_state(x, g.node(ranked[k]));
        else
            x.insert(x.end(), {0.0, 0.0, 0.0, 0.0, 0.0});
    }
    push_state(x, g.node(dest));
    x.push_back(units::to_mbps(eps_c_bps));
    x.push_back(units::to_min(eps_l_s));
    return x;
}

namespace {

Dataset make_empty(DatasetKind kind, int K) {
    Dataset d;
    d.kind = kind;
    d.K = K;
    d.x_dim = kind == DatasetKind::SO ? so_feature_dim(K) : mo_feature_dim(K);
    d.y_dim = kind == DatasetKind::SO ? so_label_dim(K) : mo_label_dim(K);
    return d;
}

void append_rows(Dataset& into, const Dataset& from) {
    into.x.insert(into.x.end(), from.x.begin(), from.x.end());
    into.y.insert(into.y.end(), from.y.begin(), from.y.end());
    into.mask.insert(into.mask.end(), from.mask.begin(), from.mask.end());
}

} // namespace

Dataset gen_so_samples(const flight::Scenario& sc, const std::vector<double>& timestamps,
                       const std::string& dest_id, int K, const LabelGenConfig& cfg) {
    if (K <= 0) throw ConfigError("gen_so_samples: K must be positive");
    std::vector<Dataset> chunks(timestamps.size());

    parallel_for(timestamps.size(), cfg.threads, [&](std::size_t ti) {
        const double ts = timestamps[ti];
        Dataset& out = chunks[ti];
        out = make_empty(DatasetKind::SO, K);

        auto snap = flight::snapshot(sc, ts);
        auto g = net::build_graph(snap, link::QueueModel::constant(cfg.const_queue_s),
                                  cfg.rp, net::zero_lifetimes(), 0);
        const int dest = g.index_of(dest_id);
        if (dest < 0) {
            std::cerr << "gen_so_samples: destination " << dest_id << " absent at ts "
                      << ts << ", skipping\n";
            return;
        }
        const auto apsp = net::floyd_warshall_constrained(g, 0.0, 0.0);

        for (int i = 0; i < g.size(); ++i) {
            const auto ranked = net::neighbors_ranked(g, i, dest, K);
            const auto x = so_features(g, i, ranked, dest, K);
            out.x.insert(out.x.end(), x.begin(), x.end());
            for (int k = 0; k < K; ++k) {
                if (k < static_cast<int>(ranked.size()) &&
                    apsp.d(ranked[k], dest) != net::kInf) {
                    out.y.push_back(units::to_ms(apsp.d(ranked[k], dest)));
                    out.mask.push_back(1);
                } else {
                    out.y.push_back(kLabelSentinel);
                    out.mask.push_back(0);
                }
            }
        }
    });

    Dataset d = make_empty(DatasetKind::SO, K);
    for (const auto& c : chunks) append_rows(d, c);
    return d;
}

MoLabelTables mo_label_tables(const net::LinkGraph& g, int dest, const EpsGrid& grid) {
    const int n = g.size();
    MoLabelTables tables(grid.l_count(),
                         std::vector<std::vector<MoLabelCell>>(
                             grid.c_count(), std::vector<MoLabelCell>(n)));

    std::vector<MoLabelCell> row_base(n); // values captured at beta = 0
    for (int alpha = 0; alpha < grid.l_count(); ++alpha) {
        std::vector<MoLabelCell> carried = row_base;
        for (int beta = 0; beta < grid.c_count(); ++beta) {
            const auto apsp = net::floyd_warshall_constrained(g, grid.eps_c(beta),
                                                              grid.eps_l(alpha));
            for (int i = 0; i < n; ++i) {
                auto p = net::extract_path(apsp, i, dest);
                MoLabelCell cell;
                if (p) {
                    const auto m = net::path_metrics(g, *p);
                    cell = {m.delay_s, m.capacity_bps, m.lifetime_s, true};
                    carried[i] = cell;
                    if (beta == 0) row_base[i] = cell;
                } else {
                    cell = carried[i];
                }
                tables[alpha][beta][i] = cell;
            }
        }
    }
    return tables;
}

Dataset gen_mo_samples(const flight::Scenario& sc, const std::vector<double>& timestamps,
                       const std::string& dest_id, int K, const EpsGrid& grid,
                       const LabelGenConfig& cfg) {
    if (K <= 0) throw ConfigError("gen_mo_samples: K must be positive");
    if (grid.step_c_bps <= 0 || grid.step_l_s <= 0 || grid.steps_c < 0 || grid.steps_l < 0)
        throw ConfigError("gen_mo_samples: invalid grid");

    const auto lifetimes = net::scenario_lifetimes(sc, cfg.lifetime);
    std::vector<Dataset> chunks(timestamps.size());

    parallel_for(timestamps.size(), cfg.threads, [&](std::size_t ti) {
        const double ts = timestamps[ti];
        Dataset& out = chunks[ti];
        out = make_empty(DatasetKind::MO, K);
        out.grid = grid;

        auto snap = flight::snapshot(sc, ts);
        auto g = net::build_graph(snap, link::QueueModel::constant(cfg.const_queue_s),
                                  cfg.rp, lifetimes, 0);
        const int dest = g.index_of(dest_id);
        if (dest < 0) {
            std::cerr << "gen_mo_samples: destination " << dest_id << " absent at ts "
                      << ts << ", skipping\n";
            return;
        }
        const auto tables = mo_label_tables(g, dest, grid);

        std::vector<std::vector<int>> ranked(g.size());
        for (int i = 0; i < g.size(); ++i) ranked[i] = net::neighbors_ranked(g, i, dest, K);

        for (int alpha = 0; alpha < grid.l_count(); ++alpha) {
            for (int beta = 0; beta < grid.c_count(); ++beta) {
                const auto& cells = tables[alpha][beta];
                for (int i = 0; i < g.size(); ++i) {
                    if (!cells[i].reachable) continue; // no value for this node yet
                    const auto x = mo_features(g, i, ranked[i], dest, K,
                                               grid.eps_c(beta), grid.eps_l(alpha));
                    out.x.insert(out.x.end(), x.begin(), x.end());
                    std::vector<double> yd(K, kLabelSentinel), yc(K, 0.0), yl(K, 0.0);
                    std::vector<std::uint8_t> mk(K, 0);
                    for (int k = 0; k < static_cast<int>(ranked[i].size()); ++k) {
                        const auto& cell = cells[ranked[i][k]];
                        if (!cell.reachable) continue;
                        yd[k] = units::to_ms(cell.delay_s);
                        yc[k] = units::to_mbps(cell.capacity_bps);
                        yl[k] = units::to_min(cell.lifetime_s);
                        mk[k] = 1;
                    }
                    out.y.insert(out.y.end(), yd.begin(), yd.end());
                    out.y.insert(out.y.end(), yc.begin(), yc.end());
                    out.y.insert(out.y.end(), yl.begin(), yl.end());
                    for (int rep = 0; rep < 3; ++rep)
                        out.mask.insert(out.mask.end(), mk.begin(), mk.end());
                }
            }
        }
    });

    Dataset d = make_empty(DatasetKind::MO, K);
    d.grid = grid;
    for (const auto& c : chunks) append_rows(d, c);
    return d;
}

std::tuple<Dataset, Dataset, Dataset> split_dataset(
    const std::vector<Dataset>& per_scenario, const std::array<double, 3>& fractions,
    std::uint64_t seed) {
    const double total = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("split_dataset: fractions must sum to 1");
    if (per_scenario.empty()) throw ConfigError("split_dataset: no scenarios");

    const int n = static_cast<int>(per_scenario.size());
    // largest-remainder allocation of scenario counts
    std::array<int, 3> counts{};
    std::array<double, 3> rem{};
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = fractions[i] * n;
        counts[i] = static_cast<int>(std::floor(exact + 1e-9));
        rem[i] = exact - counts[i];
        assigned += counts[i];
    }
    while (assigned < n) {
        const int i = static_cast<int>(std::max_element(rem.begin(), rem.end()) - rem.begin());
        ++counts[i];
        rem[i] = -1.0;
        ++assigned;
    }
    for (int i = 0; i < 3; ++i)
        if (fractions[i] > 0.0 && counts[i] == 0)
            throw ConfigError("split_dataset: too few scenarios for requested split");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng::Stream rs(rng::substream(seed, "split"));
    for (int i = n; i > 1; --i)
        std::swap(order[i - 1], order[rs.uniform_int(0, i - 1)]);

    std::array<Dataset, 3> out;
    int cursor = 0;
    for (int part = 0; part < 3; ++part) {
        out[part] = per_scenario[0];
        out[part].x.clear();
        out[part].y.clear();
        out[part].mask.clear();
        for (int k = 0; k < counts[part]; ++k) {
            const auto& src = per_scenario[order[cursor++]];
            if (src.kind != out[part].kind || src.K != out[part].K)
                throw ConfigError("split_dataset: mixed dataset schemas");
            append_rows(out[part], src);
        }
    }
    return {std::move(out[0]), std::move(out[1]), std::move(out[2])};
}

namespace {

constexpr char kMagic[8] = {'A', 'A', 'N', 'E', 'T', 'D', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw DataError("dataset file truncated");
    return v;
}

} // namespace

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kVersion);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(d.kind));
    put<std::int32_t>(out, d.K);
    put<std::int32_t>(out, d.x_dim);
    put<std::int32_t>(out, d.y_dim);
    put<double>(out, d.grid.eps_c0_bps);
    put<double>(out, d.grid.step_c_bps);
    put<std::int32_t>(out, d.grid.steps_c);
    put<double>(out, d.grid.eps_l0_s);
    put<double>(out, d.grid.step_l_s);
    put<std::int32_t>(out, d.grid.steps_l);
    put<std::int64_t>(out, d.count());
    out.write(reinterpret_cast<const char*>(d.x.data()),
              static_cast<std::streamsize>(d.x.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(d.y.data()),
              static_cast<std::streamsize>(d.y.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(d.mask.data()),
              static_cast<std::streamsize>(d.mask.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw DataError("not a dataset file: " + path.string());
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion)
        throw DataError("unsupported dataset version " + std::to_string(version));

    Dataset d;
    const auto kind = get<std::uint8_t>(in);
    if (kind > 1) throw DataError("dataset file corrupt: kind");
    d.kind = static_cast<DatasetKind>(kind);
    d.K = get<std::int32_t>(in);
    d.x_dim = get<std::int32_t>(in);
    d.y_dim = get<std::int32_t>(in);
    d.grid.eps_c0_bps = get<double>(in);
    d.grid.step_c_bps = get<double>(in);
    d.grid.steps_c = get<std::int32_t>(in);
    d.grid.eps_l0_s = get<double>(in);
    d.grid.step_l_s = get<double>(in);
    d.grid.steps_l = get<std::int32_t>(in);
    const auto count = get<std::int64_t>(in);
    if (count < 0 || d.K <= 0) throw DataError("dataset file corrupt: header");

    const int expect_x = d.kind == DatasetKind::SO ? so_feature_dim(d.K) : mo_feature_dim(d.K);
    const int expect_y = d.kind == DatasetKind::SO ? so_label_dim(d.K) : mo_label_dim(d.K);
    if (d.x_dim != expect_x || d.y_dim != expect_y)
        throw DataError("dataset file corrupt: dimensions do not match kind/K");

    d.x.resize(static_cast<std::size_t>(count) * d.x_dim);
    d.y.resize(static_cast<std::size_t>(count) * d.y_dim);
    d.mask.resize(static_cast<std::size_t>(count) * d.y_dim);
    in.read(reinterpret_cast<char*>(d.x.data()),
            static_cast<std::streamsize>(d.x.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(d.y.data()),
            static_cast<std::streamsize>(d.y.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(d.mask.data()),
            static_cast<std::streamsize>(d.mask.size()));
    if (!in) throw DataError("dataset file truncated");
    return d;
}

void require_kind(const Dataset& d, DatasetKind kind) {
    if (d.kind != kind)
        throw DataError(std::string("dataset kind mismatch: expected ") +
                        (kind == DatasetKind::SO ? "SO" : "MO") + ", file holds " +
                        (d.kind == DatasetKind::SO ? "SO" : "MO"));
}

} // namespace aanet::data
