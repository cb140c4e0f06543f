#pragma once

#include "aanet/linkmodel.hpp"
#include "aanet/netgraph.hpp"
#include "aanet/neural.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

namespace aanet::data {

enum class DatasetKind : std::uint8_t { SO = 0, MO = 1 };

// Threshold grid of the multi-objective sweep: values eps0 + i*step for
// i = 0..steps (inclusive of the base threshold).
struct EpsGrid {
    double eps_c0_bps = 20e6;
    double step_c_bps = 2e6;
    int steps_c = 15;
    double eps_l0_s = 0.0;
    double step_l_s = 300.0;
    int steps_l = 6;

    int c_count() const { return steps_c + 1; }
    int l_count() const { return steps_l + 1; }
    double eps_c(int beta) const { return eps_c0_bps + beta * step_c_bps; }
    double eps_l(int alpha) const { return eps_l0_s + alpha * step_l_s; }

    // capacity 20..50 Mbps step 2, lifetime 0..30 min step 5
    static EpsGrid paper() { return {}; }
};

// Flat row storage: one feature row, one label row and one mask row per
// sample.  Mask marks label entries that are real (not padded/unreachable).
struct Dataset {
    DatasetKind kind = DatasetKind::SO;
    int K = 0;
    int x_dim = 0;
    int y_dim = 0;
    EpsGrid grid; // meaningful for MO
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::uint8_t> mask;

    std::int64_t count() const {
        return x_dim == 0 ? 0 : static_cast<std::int64_t>(x.size()) / x_dim;
    }
    nn::Matrix features() const;
    nn::Matrix labels() const;
};

int so_feature_dim(int K); // 3(K+2)
int mo_feature_dim(int K); // 5(K+2)+2
int so_label_dim(int K);   // K
int mo_label_dim(int K);   // 3K

// Feature assembly shared between label generation and online inference:
// positions in degrees/km, speed in m/s, heading in degrees, thresholds in
// Mbps/min; zero padding past the last real neighbor.
std::vector<double> so_features(const net::LinkGraph& g, int node,
                                const std::vector<int>& ranked, int dest, int K);
std::vector<double> mo_features(const net::LinkGraph& g, int node,
                                const std::vector<int>& ranked, int dest, int K,
                                double eps_c_bps, double eps_l_s);

struct LabelGenConfig {
    link::RadioParams rp = link::paper_ku_band();
    double const_queue_s = 0.010; // queuing is constant while labeling
    link::LifetimeParams lifetime;
    int threads = 1;
};

// Per timestamp: build the constant-queuing graph, solve all-pairs minimum
// delay once, and emit one sample per node with the ranked neighbors'
// minimum delays as labels (ms).  Timestamps where the destination is
// absent are skipped with a warning.
Dataset gen_so_samples(const flight::Scenario& sc, const std::vector<double>& timestamps,
                       const std::string& dest_id, int K, const LabelGenConfig& cfg);

// Label values of the nested threshold sweep for one graph, with
// carry-forward of the last feasible solve per node.  reachable is false
// until some cell of the sweep has produced a value.
struct MoLabelCell {
    double delay_s = 0.0;
    double capacity_bps = 0.0;
    double lifetime_s = 0.0;
    bool reachable = false;
};

// indexed [alpha][beta][node]
using MoLabelTables = std::vector<std::vector<std::vector<MoLabelCell>>>;
MoLabelTables mo_label_tables(const net::LinkGraph& g, int dest, const EpsGrid& grid);

// Nested (lifetime, capacity) sweep per timestamp; infeasible cells reuse
// the carried values and samples are emitted only for nodes with a value.
Dataset gen_mo_samples(const flight::Scenario& sc, const std::vector<double>& timestamps,
                       const std::string& dest_id, int K, const EpsGrid& grid,
                       const LabelGenConfig& cfg);

// Split at scenario granularity (whole generated days).
std::tuple<Dataset, Dataset, Dataset> split_dataset(
    const std::vector<Dataset>& per_scenario, const std::array<double, 3>& fractions,
    std::uint64_t seed);

void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);
void require_kind(const Dataset& d, DatasetKind kind);

// Paper sentinel for unreachable/padded label slots, in label units (ms).
inline constexpr double kLabelSentinel = 1e8;

} // namespace aanet::data
