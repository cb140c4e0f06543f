// aanet: desk-scale laboratory for DL-aided packet routing in aeronautical
// ad-hoc networks.  Subcommands cover the full pipeline: scenario synthesis,
// dataset generation, training, policy evaluation, Pareto-front extraction.

#include "CLI11.hpp"

#include "aanet/datasetgen.hpp"
#include "aanet/errors.hpp"
#include "aanet/flightdata.hpp"
#include "aanet/neural.hpp"
#include "aanet/pareto.hpp"
#include "aanet/rng.hpp"
#include "aanet/router.hpp"
#include "aanet/simulator.hpp"
#include "aanet/units.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using namespace aanet;

namespace {

constexpr const char* kVersion = "1.0.0";

void write_manifest(CLI::App* sub, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest " + path.string());
    out << "# aanet " << kVersion << " :: " << sub->get_name()
        << " run manifest; reusable via --config\n";
    out << sub->config_to_str(true, false);
}

std::vector<double> make_timestamps(double start, double end, double step) {
    if (step <= 0.0) throw ConfigError("--ts-step must be positive");
    if (end < start) throw ConfigError("--ts-end must not precede --ts-start");
    std::vector<double> ts;
    for (double t = start; t <= end + 1e-9; t += step) ts.push_back(t);
    return ts;
}

flight::Scenario load_scenario_dir(const fs::path& dir) {
    return flight::load_scenario(dir / "flights.csv", dir / "ground_stations.csv");
}

struct GenOptions {
    std::string out_dir;
    flight::SynthConfig synth;
    std::vector<std::string> gs_specs;
    double shift_sigma_s = 0.0;
    std::uint64_t seed = 42;
    std::uint64_t shift_seed = 1;
};

void run_gen(const GenOptions& o, CLI::App* sub) {
    flight::SynthConfig cfg = o.synth;
    if (!o.gs_specs.empty()) {
        cfg.ground_stations.clear();
        for (const auto& spec : o.gs_specs) {
            std::stringstream ss(spec);
            std::string id, lat, lon;
            if (!std::getline(ss, id, ',') || !std::getline(ss, lat, ',') ||
                !std::getline(ss, lon, ','))
                throw ConfigError("--gs expects 'id,lat,lon', got '" + spec + "'");
            cfg.ground_stations.push_back({id, {std::stod(lat), std::stod(lon), 0.0}});
        }
    }
    auto sc = flight::synth_scenario(cfg, o.seed);
    if (o.shift_sigma_s > 0.0)
        sc = flight::time_shift_augment(sc, o.shift_sigma_s, o.shift_seed);

    fs::create_directories(o.out_dir);
    flight::save_scenario(sc, fs::path(o.out_dir) / "flights.csv",
                          fs::path(o.out_dir) / "ground_stations.csv");
    write_manifest(sub, fs::path(o.out_dir) / "scenario.manifest");
    std::cout << "wrote scenario with " << sc.flights.size() << " flights to "
              << o.out_dir << "\n";
}

struct DatasetOptions {
    std::string scenario_dir;
    std::string dest = "GS0";
    std::string kind = "so";
    int k = 10;
    double ts_start = 0.0, ts_end = 21600.0, ts_step = 60.0;
    double queue_ms = 10.0;
    std::string out;
    double eps_c0_mbps = 20.0, eps_c_step_mbps = 2.0;
    int eps_c_steps = 15;
    double eps_l0_min = 0.0, eps_l_step_min = 5.0;
    int eps_l_steps = 6;
    int threads = 1;
};

void run_dataset(const DatasetOptions& o, CLI::App* sub) {
    auto sc = load_scenario_dir(o.scenario_dir);
    const auto ts = make_timestamps(o.ts_start, o.ts_end, o.ts_step);
    data::LabelGenConfig cfg;
    cfg.const_queue_s = units::from_ms(o.queue_ms);
    cfg.threads = o.threads;

    data::Dataset ds;
    if (o.kind == "so") {
        ds = data::gen_so_samples(sc, ts, o.dest, o.k, cfg);
    } else if (o.kind == "mo") {
        data::EpsGrid grid;
        grid.eps_c0_bps = units::from_mbps(o.eps_c0_mbps);
        grid.step_c_bps = units::from_mbps(o.eps_c_step_mbps);
        grid.steps_c = o.eps_c_steps;
        grid.eps_l0_s = units::from_min(o.eps_l0_min);
        grid.step_l_s = units::from_min(o.eps_l_step_min);
        grid.steps_l = o.eps_l_steps;
        ds = data::gen_mo_samples(sc, ts, o.dest, o.k, grid, cfg);
    } else {
        throw ConfigError("--kind must be so or mo");
    }
    data::save_dataset(ds, o.out);
    write_manifest(sub, o.out + ".manifest");
    std::cout << "wrote " << ds.count() << " samples (" << o.kind << ", K=" << o.k
              << ") to " << o.out << "\n";
}

struct TrainOptions {
    std::string dataset;
    std::string out;
    double lr = 1e-3;
    int batch = 1000;
    int iters = 2000;
    std::uint64_t seed = 42;
};

void run_train(const TrainOptions& o, CLI::App* sub) {
    auto ds = data::load_dataset(o.dataset);
    const auto spec = ds.kind == data::DatasetKind::SO ? nn::so_spec(ds.K)
                                                       : nn::mo_spec(ds.K);
    if (ds.count() == 0) throw DataError("dataset is empty");

    nn::TrainHyper h;
    h.lr = o.lr;
    h.batch = o.batch;
    h.iters = o.iters;
    h.seed = o.seed;
    auto res = nn::train(spec, ds.features(), ds.labels(), ds.mask, h);
    nn::save_model(res.params, o.out);

    std::ofstream curve(o.out + ".loss.csv");
    curve << "# iter, loss\n";
    curve.precision(12);
    for (std::size_t i = 0; i < res.loss_curve.size(); ++i)
        curve << i << ',' << res.loss_curve[i] << '\n';
    write_manifest(sub, o.out + ".manifest");
    std::cout << "trained " << (ds.kind == data::DatasetKind::SO ? "SO" : "MO")
              << " model (" << nn::trainable_param_count(res.params)
              << " parameters, final loss " << res.loss_curve.back() << ") to " << o.out
              << "\n";
}

struct EvalOptions {
    std::string scenario_dir;
    std::string dest = "GS0";
    std::string policies = "optimal,greedy,glsr,dl-fb";
    std::string model;
    int k = 10;
    double ts_start = 0.0, ts_end = 3600.0, ts_step = 300.0;
    std::string out_prefix;
    std::string queue_model = "gauss";
    double queue_mean_ms = 10.0, queue_std_ms = 5.0, queue_lower_ms = 1.0;
    double queue_const_ms = 10.0;
    std::uint64_t seed = 42;
    int threads = 1;
    int hop_limit = 100;
};

void run_eval(const EvalOptions& o, CLI::App* sub) {
    auto sc = load_scenario_dir(o.scenario_dir);
    const auto ts = make_timestamps(o.ts_start, o.ts_end, o.ts_step);

    sim::SimConfig cfg;
    cfg.K = o.k;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.hop_limit = o.hop_limit;
    if (o.queue_model == "gauss")
        cfg.queue = link::QueueModel::trunc_gaussian(units::from_ms(o.queue_mean_ms),
                                                     units::from_ms(o.queue_std_ms),
                                                     units::from_ms(o.queue_lower_ms));
    else if (o.queue_model == "constant")
        cfg.queue = link::QueueModel::constant(units::from_ms(o.queue_const_ms));
    else
        throw ConfigError("--queue-model must be gauss or constant");

    std::unique_ptr<route::MLPEstimator> est;
    std::vector<sim::Policy> policies;
    std::stringstream ss(o.policies);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name == "optimal") {
            policies.push_back(sim::Policy::optimal());
        } else if (name == "greedy") {
            policies.push_back(sim::Policy::greedy());
        } else if (name == "glsr") {
            policies.push_back(sim::Policy::glsr());
        } else if (name == "dl-nofb" || name == "dl-fb") {
            if (!est) {
                if (o.model.empty())
                    throw ConfigError("policy " + name + " requires --model");
                est = std::make_unique<route::MLPEstimator>(nn::load_model(o.model), o.k,
                                                            data::DatasetKind::SO);
            }
            policies.push_back(name == "dl-fb" ? sim::Policy::dl_fb(est.get())
                                               : sim::Policy::dl_nofb(est.get()));
        } else {
            throw ConfigError("unknown policy '" + name + "'");
        }
    }
    if (policies.empty()) throw ConfigError("no policies selected");

    std::ofstream summary(o.out_prefix + ".summary.csv");
    summary << "# policy, packets, delivered, mean_delay_ms, success_prob_200ms\n";
    summary.precision(12);
    for (const auto& p : policies) {
        auto rep = sim::eval_policy(sc, ts, o.dest, p, cfg);
        const std::string pname = sim::to_string(p.kind);
        std::ofstream out(o.out_prefix + "." + pname + ".csv");
        sim::write_eval_csv(out, rep);
        std::ofstream cdf(o.out_prefix + "." + pname + ".cdf.csv");
        sim::write_cdf_csv(cdf, rep);
        summary << pname << ',' << rep.results.size() << ',' << rep.delivered() << ','
                << units::to_ms(rep.mean_delay_s()) << ',' << rep.success_prob() << '\n';
        std::cout << pname << ": " << rep.delivered() << "/" << rep.results.size()
                  << " delivered, mean delay " << units::to_ms(rep.mean_delay_s())
                  << " ms, success " << rep.success_prob() << "\n";
    }
    write_manifest(sub, o.out_prefix + ".manifest");
}

struct ParetoOptions {
    std::string scenario_dir;
    std::string src = "F000";
    std::string dest = "GS0";
    double ts = 0.0;
    std::string out_prefix;
    std::string model;
    bool oracle = false;
    int k = 40;
    double lambda = 10.0;
    double queue_const_ms = 10.0;
    double eps_c0_mbps = 20.0, eps_c_step_mbps = 2.0;
    int eps_c_steps = 15;
    double eps_l0_min = 0.0, eps_l_step_min = 5.0;
    int eps_l_steps = 6;
    std::uint64_t seed = 42;
    int hop_limit = 100;
};

void run_pareto(const ParetoOptions& o, CLI::App* sub) {
    auto sc = load_scenario_dir(o.scenario_dir);

    sim::SimConfig cfg;
    cfg.K = o.k;
    cfg.seed = o.seed;
    cfg.lifetimes = true;
    cfg.queue = link::QueueModel::constant(units::from_ms(o.queue_const_ms));
    cfg.hop_limit = o.hop_limit;

    auto snap = flight::snapshot(sc, o.ts);
    auto g = net::build_graph(snap, cfg.queue, cfg.rp,
                              net::scenario_lifetimes(sc, cfg.lifetime_params),
                              rng::substream(cfg.seed, "packet-queue",
                                             std::bit_cast<std::uint64_t>(o.ts),
                                             rng::fnv1a(o.src)));
    const int src = g.index_of(o.src);
    const int dst = g.index_of(o.dest);
    if (src < 0) throw DataError("source " + o.src + " absent at ts");
    if (dst < 0) throw DataError("destination " + o.dest + " absent at ts");

    data::EpsGrid grid;
    grid.eps_c0_bps = units::from_mbps(o.eps_c0_mbps);
    grid.step_c_bps = units::from_mbps(o.eps_c_step_mbps);
    grid.steps_c = o.eps_c_steps;
    grid.eps_l0_s = units::from_min(o.eps_l0_min);
    grid.step_l_s = units::from_min(o.eps_l_step_min);
    grid.steps_l = o.eps_l_steps;

    auto front = pareto::pomor(g, src, dst);
    std::ofstream fout(o.out_prefix + ".pomor.csv");
    pareto::write_pareto_csv(fout, g, front);
    std::cout << "pomor front: " << front.size() << " solutions\n";

    std::unique_ptr<route::Estimator> est;
    if (o.oracle)
        est = std::make_unique<route::MoOracleEstimator>(g, dst, grid);
    else if (!o.model.empty())
        est = std::make_unique<route::MLPEstimator>(nn::load_model(o.model), o.k,
                                                    data::DatasetKind::MO);
    if (est) {
        auto sweep = sim::mo_sweep_on_graph(g, src, dst, *est, grid, o.lambda, cfg.K,
                                            cfg.hop_limit);
        std::ofstream sout(o.out_prefix + ".sweep.csv");
        sout << "# eps_c_mbps, eps_l_min, delay_ms, capacity_mbps, lifetime_min, hops, node_ids...\n";
        sout.precision(12);
        for (const auto& e : sweep) {
            sout << units::to_mbps(e.eps_c_bps) << ',' << units::to_min(e.eps_l_s) << ','
                 << units::to_ms(e.outcome.metrics.delay_s) << ','
                 << units::to_mbps(e.outcome.metrics.capacity_bps) << ','
                 << units::to_min(e.outcome.metrics.lifetime_s) << ',' << e.outcome.hops;
            for (int v : e.outcome.path.nodes) sout << ',' << g.node(v).id;
            sout << '\n';
        }
        std::cout << "dl sweep: " << sweep.size() << " distinct paths\n";
    }
    write_manifest(sub, o.out_prefix + ".manifest");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"aanet: DL-aided routing laboratory for aeronautical ad-hoc networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default(true);

    GenOptions gen;
    auto* sub_gen = app.add_subcommand("gen", "synthesize a flight scenario");
    sub_gen->set_config("--config");
    sub_gen->add_option("--out-dir", gen.out_dir, "output directory")->required();
    sub_gen->add_option("--flights", gen.synth.flight_count, "number of flights");
    sub_gen->add_option("--duration-s", gen.synth.duration_s, "scenario length, s");
    sub_gen->add_option("--interval-s", gen.synth.sample_interval_s, "sampling interval, s");
    sub_gen->add_option("--lat-min", gen.synth.lat_min_deg, "box south edge, deg");
    sub_gen->add_option("--lat-max", gen.synth.lat_max_deg, "box north edge, deg");
    sub_gen->add_option("--lon-min", gen.synth.lon_min_deg, "box west edge, deg");
    sub_gen->add_option("--lon-max", gen.synth.lon_max_deg, "box east edge, deg");
    sub_gen->add_option("--alt-min-km", gen.synth.alt_min_km, "altitude band low, km");
    sub_gen->add_option("--alt-max-km", gen.synth.alt_max_km, "altitude band high, km");
    sub_gen->add_option("--speed-min", gen.synth.speed_min_mps, "speed band low, m/s");
    sub_gen->add_option("--speed-max", gen.synth.speed_max_mps, "speed band high, m/s");
    sub_gen->add_option("--gs", gen.gs_specs, "ground station 'id,lat,lon' (repeatable)");
    sub_gen->add_option("--shift-sigma-s", gen.shift_sigma_s,
                        "Gaussian time-shift augmentation sigma, s (0 = off)");
    sub_gen->add_option("--shift-seed", gen.shift_seed, "seed of the shift draws");
    sub_gen->add_option("--seed", gen.seed, "top-level seed");

    DatasetOptions dso;
    auto* sub_ds = app.add_subcommand("dataset", "generate supervised training samples");
    sub_ds->set_config("--config");
    sub_ds->add_option("--scenario", dso.scenario_dir, "scenario directory")->required();
    sub_ds->add_option("--dest", dso.dest, "destination node id");
    sub_ds->add_option("--kind", dso.kind, "so or mo");
    sub_ds->add_option("--k", dso.k, "ranked neighbors per node");
    sub_ds->add_option("--ts-start", dso.ts_start, "first label timestamp, s");
    sub_ds->add_option("--ts-end", dso.ts_end, "last label timestamp, s");
    sub_ds->add_option("--ts-step", dso.ts_step, "label timestamp step, s");
    sub_ds->add_option("--queue-ms", dso.queue_ms, "constant labeling queue delay, ms");
    sub_ds->add_option("--out", dso.out, "output dataset file")->required();
    sub_ds->add_option("--eps-c0-mbps", dso.eps_c0_mbps, "capacity grid base, Mbps");
    sub_ds->add_option("--eps-c-step-mbps", dso.eps_c_step_mbps, "capacity grid step");
    sub_ds->add_option("--eps-c-steps", dso.eps_c_steps, "capacity grid step count");
    sub_ds->add_option("--eps-l0-min", dso.eps_l0_min, "lifetime grid base, min");
    sub_ds->add_option("--eps-l-step-min", dso.eps_l_step_min, "lifetime grid step");
    sub_ds->add_option("--eps-l-steps", dso.eps_l_steps, "lifetime grid step count");
    sub_ds->add_option("--threads", dso.threads, "worker cap");

    TrainOptions tro;
    auto* sub_tr = app.add_subcommand("train", "train a routing DNN");
    sub_tr->set_config("--config");
    sub_tr->add_option("--dataset", tro.dataset, "training dataset")->required();
    sub_tr->add_option("--out", tro.out, "output model file")->required();
    sub_tr->add_option("--lr", tro.lr, "Adam learning rate");
    sub_tr->add_option("--batch", tro.batch, "mini-batch size");
    sub_tr->add_option("--iters", tro.iters, "training iterations");
    sub_tr->add_option("--seed", tro.seed, "top-level seed");

    EvalOptions evo;
    auto* sub_ev = app.add_subcommand("eval", "evaluate routing policies");
    sub_ev->set_config("--config");
    sub_ev->add_option("--scenario", evo.scenario_dir, "scenario directory")->required();
    sub_ev->add_option("--dest", evo.dest, "destination node id");
    sub_ev->add_option("--policies", evo.policies, "comma list of policies");
    sub_ev->add_option("--model", evo.model, "SO model file (dl policies)");
    sub_ev->add_option("--k", evo.k, "candidate set size");
    sub_ev->add_option("--ts-start", evo.ts_start, "first eval timestamp, s");
    sub_ev->add_option("--ts-end", evo.ts_end, "last eval timestamp, s");
    sub_ev->add_option("--ts-step", evo.ts_step, "eval timestamp step, s");
    sub_ev->add_option("--out-prefix", evo.out_prefix, "output file prefix")->required();
    sub_ev->add_option("--queue-model", evo.queue_model, "gauss or constant");
    sub_ev->add_option("--queue-mean-ms", evo.queue_mean_ms, "queue mean, ms");
    sub_ev->add_option("--queue-std-ms", evo.queue_std_ms, "queue std, ms");
    sub_ev->add_option("--queue-lower-ms", evo.queue_lower_ms, "queue truncation, ms");
    sub_ev->add_option("--queue-const-ms", evo.queue_const_ms, "constant queue, ms");
    sub_ev->add_option("--seed", evo.seed, "top-level seed");
    sub_ev->add_option("--threads", evo.threads, "worker cap");
    sub_ev->add_option("--hop-limit", evo.hop_limit, "per-packet hop limit");

    ParetoOptions pao;
    auto* sub_pa = app.add_subcommand("pareto", "extract Pareto fronts");
    sub_pa->set_config("--config");
    sub_pa->add_option("--scenario", pao.scenario_dir, "scenario directory")->required();
    sub_pa->add_option("--src", pao.src, "source node id");
    sub_pa->add_option("--dest", pao.dest, "destination node id");
    sub_pa->add_option("--ts", pao.ts, "snapshot timestamp, s");
    sub_pa->add_option("--out-prefix", pao.out_prefix, "output file prefix")->required();
    sub_pa->add_option("--model", pao.model, "MO model file for the DL sweep");
    sub_pa->add_flag("--oracle", pao.oracle, "use exact label tables for the DL sweep");
    sub_pa->add_option("--k", pao.k, "candidate set size");
    sub_pa->add_option("--lambda", pao.lambda, "constraint penalty coefficient");
    sub_pa->add_option("--queue-const-ms", pao.queue_const_ms, "constant queue, ms");
    sub_pa->add_option("--eps-c0-mbps", pao.eps_c0_mbps, "capacity grid base, Mbps");
    sub_pa->add_option("--eps-c-step-mbps", pao.eps_c_step_mbps, "capacity grid step");
    sub_pa->add_option("--eps-c-steps", pao.eps_c_steps, "capacity grid step count");
    sub_pa->add_option("--eps-l0-min", pao.eps_l0_min, "lifetime grid base, min");
    sub_pa->add_option("--eps-l-step-min", pao.eps_l_step_min, "lifetime grid step");
    sub_pa->add_option("--eps-l-steps", pao.eps_l_steps, "lifetime grid step count");
    sub_pa->add_option("--seed", pao.seed, "top-level seed");
    sub_pa->add_option("--hop-limit", pao.hop_limit, "per-packet hop limit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sub_gen->parsed()) run_gen(gen, sub_gen);
        if (sub_ds->parsed()) run_dataset(dso, sub_ds);
        if (sub_tr->parsed()) run_train(tro, sub_tr);
        if (sub_ev->parsed()) run_eval(evo, sub_ev);
        if (sub_pa->parsed()) run_pareto(pao, sub_pa);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
