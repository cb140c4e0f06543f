#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aanet/errors.hpp"
#include "aanet/neural.hpp"
#include "aanet/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace aanet;
using namespace aanet::nn;

namespace {

template <class F>
void visit_trainable(MLPParams& p, F&& f) {
    for (auto& l : p.layers) {
        if (l.kind == LayerKind::FullyConnected) {
            for (auto& v : l.fc.w.a) f(v);
            for (auto& v : l.fc.b) f(v);
        } else if (l.kind == LayerKind::BatchNorm) {
            for (auto& v : l.bn.gamma) f(v);
            for (auto& v : l.bn.beta) f(v);
        }
    }
}

std::vector<double> flatten_grads(const MLPParams& p, const Gradients& g) {
    std::vector<double> out;
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        if (p.layers[i].kind == LayerKind::FullyConnected) {
            out.insert(out.end(), g[i].dw.a.begin(), g[i].dw.a.end());
            out.insert(out.end(), g[i].db.begin(), g[i].db.end());
        } else if (p.layers[i].kind == LayerKind::BatchNorm) {
            out.insert(out.end(), g[i].dgamma.begin(), g[i].dgamma.end());
            out.insert(out.end(), g[i].dbeta.begin(), g[i].dbeta.end());
        }
    }
    return out;
}

// central finite differences over every trainable parameter
void gradcheck(const MLPSpec& spec, int batch, std::uint64_t seed, double h = 1e-4,
               double tol = 1e-4) {
    MLPParams p = init(spec, seed);
    rng::Stream rs(rng::substream(seed, "gradcheck-data"));
    Matrix x(batch, spec.input_dim), y(batch, spec.output_dim());
    std::vector<std::uint8_t> mask(y.a.size());
    for (auto& v : x.a) v = rs.uniform(-2.0, 2.0);
    for (auto& v : y.a) v = rs.uniform(-2.0, 2.0);
    for (auto& m : mask) m = rs.uniform() < 0.8 ? 1 : 0;
    if (std::count(mask.begin(), mask.end(), 1) == 0) mask[0] = 1;

    ForwardTrace trace;
    MLPParams work = p;
    Matrix pred = forward(work, x, Mode::Train, &trace);
    Matrix dpred = loss_mse_grad(pred, y, mask);
    Gradients g = backward(work, trace, dpred);
    const auto analytic = flatten_grads(work, g);

    std::vector<double*> slots;
    MLPParams probe = p;
    visit_trainable(probe, [&](double& v) { slots.push_back(&v); });
    REQUIRE(slots.size() == analytic.size());

    int checked = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double orig = *slots[i];
        *slots[i] = orig + h;
        MLPParams plus = probe;
        const double lp = loss_mse(forward(plus, x, Mode::Train), y, mask);
        *slots[i] = orig - h;
        MLPParams minus = probe;
        const double lm = loss_mse(forward(minus, x, Mode::Train), y, mask);
        *slots[i] = orig;
        const double fd = (lp - lm) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
        CHECK(std::abs(fd - analytic[i]) / denom <= tol);
        ++checked;
    }
    CHECK(checked == static_cast<int>(slots.size()));
}

} // namespace

TEST_CASE("spec shapes: paper architectures") {
    auto so = so_spec(10);
    CHECK(so.input_dim == 36);
    CHECK(so.output_dim() == 10);
    auto mo = mo_spec(40);
    CHECK(mo.input_dim == 212);
    CHECK(mo.output_dim() == 120);
    CHECK(trainable_param_count(init(so, 1)) == 15282);
}

TEST_CASE("init: He std, output support, determinism") {
    auto p = init(so_spec(10), 2024);
    // second hidden FC is 100 -> 100: ten thousand He draws
    const auto& hidden = p.layers[4];
    REQUIRE(hidden.kind == LayerKind::FullyConnected);
    REQUIRE(hidden.dim_in == 100);
    double sum = 0.0, sq = 0.0;
    for (double v : hidden.fc.w.a) {
        sum += v;
        sq += v * v;
    }
    const double n = static_cast<double>(hidden.fc.w.a.size());
    const double std = std::sqrt(sq / n - (sum / n) * (sum / n));
    CHECK(std == doctest::Approx(std::sqrt(2.0 / 100.0)).epsilon(0.05));
    for (double v : hidden.fc.b) CHECK(v == 0.0);

    const auto& head = p.layers.back();
    REQUIRE(head.kind == LayerKind::FullyConnected);
    for (double v : head.fc.w.a) {
        CHECK(v >= -3e-3);
        CHECK(v <= 3e-3);
    }
    for (double v : head.fc.b) {
        CHECK(v >= -3e-3);
        CHECK(v <= 3e-3);
    }

    auto p2 = init(so_spec(10), 2024);
    CHECK(p2.layers[1].fc.w.a == p.layers[1].fc.w.a);
    auto p3 = init(so_spec(10), 2025);
    CHECK(p3.layers[1].fc.w.a != p.layers[1].fc.w.a);
}

TEST_CASE("forward: identity FC + ReLU clamps negatives") {
    MLPSpec spec;
    spec.input_dim = 3;
    spec.trunk = {LayerSpec::fc(3), LayerSpec::relu()};
    auto p = init(spec, 1);
    auto& fc = p.layers[0].fc;
    fc.w = Matrix(3, 3);
    for (int i = 0; i < 3; ++i) fc.w(i, i) = 1.0;
    fc.b.assign(3, 0.0);

    Matrix x(2, 3);
    x(0, 0) = -1.0;
    x(0, 1) = -0.5;
    x(0, 2) = 2.0;
    x(1, 0) = -3.0;
    x(1, 1) = 0.0;
    x(1, 2) = -0.1;
    auto y = infer(p, x);
    CHECK(y(0, 0) == 0.0);
    CHECK(y(0, 1) == 0.0);
    CHECK(y(0, 2) == 2.0);
    CHECK(y(1, 0) == 0.0);
    CHECK(y(1, 1) == 0.0);
    CHECK(y(1, 2) == 0.0);
}

TEST_CASE("BN train mode: per-feature mean beta, variance gamma^2") {
    MLPSpec spec;
    spec.input_dim = 3;
    spec.trunk = {LayerSpec::bn(), LayerSpec::fc(3)};
    auto p = init(spec, 1);
    auto& fc = p.layers[1].fc;
    fc.w = Matrix(3, 3);
    for (int i = 0; i < 3; ++i) fc.w(i, i) = 1.0;
    fc.b.assign(3, 0.0);
    p.layers[0].bn.gamma = {2.0, 1.0, 0.5};
    p.layers[0].bn.beta = {0.5, -1.0, 0.0};

    rng::Stream rs(7);
    Matrix x(256, 3);
    for (auto& v : x.a) v = rs.gaussian(5.0, 3.0);
    auto y = forward(p, x, Mode::Train);
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (int r = 0; r < y.rows; ++r) mean += y(r, c);
        mean /= y.rows;
        double var = 0.0;
        for (int r = 0; r < y.rows; ++r) var += (y(r, c) - mean) * (y(r, c) - mean);
        var /= y.rows;
        CHECK(mean == doctest::Approx(p.layers[0].bn.beta[c]).epsilon(1e-9));
        const double g = p.layers[0].bn.gamma[c];
        CHECK(var == doctest::Approx(g * g).epsilon(1e-6));
    }

    Matrix one(1, 3);
    CHECK_THROWS_AS(forward(p, one, Mode::Train), ConfigError);
}

TEST_CASE("infer matches a hand-rolled two-layer matrix oracle") {
    MLPSpec spec;
    spec.input_dim = 4;
    spec.trunk = {LayerSpec::fc(5), LayerSpec::relu(), LayerSpec::fc(2)};
    auto p = init(spec, 33);

    rng::Stream rs(44);
    Matrix x(6, 4);
    for (auto& v : x.a) v = rs.uniform(-1.0, 1.0);
    auto got = infer(p, x);

    const auto& w1 = p.layers[0].fc;
    const auto& w2 = p.layers[2].fc;
    for (int r = 0; r < x.rows; ++r) {
        double hid[5];
        for (int o = 0; o < 5; ++o) {
            double s = w1.b[o];
            for (int k = 0; k < 4; ++k) s += x(r, k) * w1.w(o, k);
            hid[o] = s > 0 ? s : 0.0;
        }
        for (int o = 0; o < 2; ++o) {
            double s = w2.b[o];
            for (int k = 0; k < 5; ++k) s += hid[k] * w2.w(o, k);
            CHECK(got(r, o) == doctest::Approx(s).epsilon(1e-12));
        }
    }
}

TEST_CASE("infer is batch-size independent per row") {
    auto p = init(so_spec(4), 9);
    rng::Stream rs(10);
    Matrix x(7, p.spec.input_dim);
    for (auto& v : x.a) v = rs.uniform(-1.0, 1.0);
    auto full = infer(p, x);
    for (int r = 0; r < x.rows; ++r) {
        Matrix one(1, x.cols);
        std::copy(x.row(r), x.row(r) + x.cols, one.row(0));
        auto single = infer(p, one);
        for (int c = 0; c < full.cols; ++c) CHECK(single(0, c) == full(r, c));
    }
}

TEST_CASE("loss_mse: trivial values, oracle, empty mask") {
    Matrix a(2, 3), b(2, 3);
    std::vector<std::uint8_t> mask(6, 1);
    CHECK(loss_mse(a, b, mask) == 0.0);

    for (auto& v : a.a) v = 1.0;
    CHECK(loss_mse(a, b, mask) == doctest::Approx(1.0));

    rng::Stream rs(3);
    for (auto& v : a.a) v = rs.uniform(-2, 2);
    for (auto& v : b.a) v = rs.uniform(-2, 2);
    mask = {1, 0, 1, 1, 0, 1};
    double expect = 0.0;
    int cnt = 0;
    for (int i = 0; i < 6; ++i)
        if (mask[i]) {
            expect += (a.a[i] - b.a[i]) * (a.a[i] - b.a[i]);
            ++cnt;
        }
    CHECK(loss_mse(a, b, mask) == doctest::Approx(expect / cnt).epsilon(1e-12));

    std::vector<std::uint8_t> empty(6, 0);
    CHECK_THROWS_AS(loss_mse(a, b, empty), ConfigError);
}

TEST_CASE("backward: zero loss gives zero gradients") {
    auto spec = so_spec(3);
    auto p = init(spec, 5);
    rng::Stream rs(6);
    Matrix x(8, spec.input_dim);
    for (auto& v : x.a) v = rs.uniform(-1, 1);
    ForwardTrace t;
    Matrix pred = forward(p, x, Mode::Train, &t);
    std::vector<std::uint8_t> mask(pred.a.size(), 1);
    Matrix dpred = loss_mse_grad(pred, pred, mask);
    auto g = backward(p, t, dpred);
    for (double v : flatten_grads(p, g)) CHECK(v == 0.0);
}

TEST_CASE("backward: single-layer bias gradient equals twice the mean residual") {
    MLPSpec spec;
    spec.input_dim = 3;
    spec.trunk = {LayerSpec::fc(1)};
    auto p = init(spec, 8);
    rng::Stream rs(9);
    const int n = 16;
    Matrix x(n, 3), y(n, 1);
    for (auto& v : x.a) v = rs.uniform(-1, 1);
    for (auto& v : y.a) v = rs.uniform(-1, 1);
    std::vector<std::uint8_t> mask(n, 1);

    ForwardTrace t;
    Matrix pred = forward(p, x, Mode::Train, &t);
    Matrix dpred = loss_mse_grad(pred, y, mask);
    auto g = backward(p, t, dpred);

    double mean_resid = 0.0;
    for (int r = 0; r < n; ++r) mean_resid += pred(r, 0) - y(r, 0);
    mean_resid /= n;
    CHECK(g[0].db[0] == doctest::Approx(2.0 * mean_resid).epsilon(1e-10));
}

TEST_CASE("gradients match central finite differences (toy nets with BN)") {
    MLPSpec toy;
    toy.input_dim = 4;
    toy.trunk = {LayerSpec::bn(), LayerSpec::fc(6), LayerSpec::bn(), LayerSpec::relu(),
                 LayerSpec::fc(3)};
    gradcheck(toy, 8, 111);

    MLPSpec streams;
    streams.input_dim = 5;
    streams.trunk = {LayerSpec::bn(), LayerSpec::fc(6), LayerSpec::bn(),
                     LayerSpec::relu()};
    streams.streams = {
        {LayerSpec::fc(4), LayerSpec::bn(), LayerSpec::relu(), LayerSpec::fc(2)},
        {LayerSpec::fc(4), LayerSpec::bn(), LayerSpec::relu(), LayerSpec::fc(2)},
        {LayerSpec::fc(4), LayerSpec::bn(), LayerSpec::relu(), LayerSpec::fc(2)}};
    gradcheck(streams, 8, 222);
}

TEST_CASE("adam: zero grad no-op, signed first step, quadratic bowl") {
    MLPSpec spec;
    spec.input_dim = 2;
    spec.trunk = {LayerSpec::fc(2)};
    auto p = init(spec, 3);
    auto st = make_adam(p, 1e-3);

    Gradients zero(p.layers.size());
    zero[0].dw = Matrix(2, 2);
    zero[0].db.assign(2, 0.0);
    const auto before = p.layers[0].fc.w.a;
    adam_step(p, zero, st);
    CHECK(p.layers[0].fc.w.a == before);

    Gradients g(p.layers.size());
    g[0].dw = Matrix(2, 2);
    g[0].dw(0, 0) = 0.7;
    g[0].dw(0, 1) = -1.3;
    g[0].dw(1, 0) = 0.02;
    g[0].dw(1, 1) = -0.004;
    g[0].db.assign(2, 0.0);
    auto p2 = init(spec, 3);
    auto st2 = make_adam(p2, 1e-3);
    const auto w0 = p2.layers[0].fc.w.a;
    adam_step(p2, g, st2);
    for (int i = 0; i < 4; ++i) {
        const double delta = p2.layers[0].fc.w.a[i] - w0[i];
        const double sign = g[0].dw.a[i] > 0 ? 1.0 : -1.0;
        CHECK(delta == doctest::Approx(-1e-3 * sign).epsilon(1e-4));
    }

    // quadratic bowl: minimize |w - t|^2 with analytic gradients
    auto p3 = init(spec, 3);
    auto st3 = make_adam(p3, 1e-3);
    std::vector<double> target = {0.05, -0.03, 0.02, -0.05};
    for (int it = 0; it < 200; ++it) {
        Gradients gq(p3.layers.size());
        gq[0].dw = Matrix(2, 2);
        for (int i = 0; i < 4; ++i)
            gq[0].dw.a[i] = 2.0 * (p3.layers[0].fc.w.a[i] - target[i]);
        gq[0].db.assign(2, 0.0);
        adam_step(p3, gq, st3);
    }
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(p3.layers[0].fc.w.a[i] - target[i]) < 1e-3);
}

TEST_CASE("train: learns y = sum(x); loss decreases; deterministic") {
    MLPSpec spec;
    spec.input_dim = 4;
    spec.trunk = {LayerSpec::bn(), LayerSpec::fc(16), LayerSpec::bn(), LayerSpec::relu(),
                  LayerSpec::fc(1)};
    rng::Stream rs(55);
    const int n = 2048;
    Matrix x(n, 4), y(n, 1);
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int c = 0; c < 4; ++c) {
            x(r, c) = rs.uniform(-1.0, 1.0);
            s += x(r, c);
        }
        y(r, 0) = s;
    }
    std::vector<std::uint8_t> mask(n, 1);

    TrainHyper h;
    h.lr = 3e-3;
    h.batch = 256;
    h.iters = 3000;
    h.seed = 7;
    auto res = train(spec, x, y, mask, h);

    auto window = [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += res.loss_curve[i];
        return s / (hi - lo);
    };
    REQUIRE(res.loss_curve.size() == 3000);
    CHECK(window(2950, 3000) < window(0, 50));
    // fit quality judged with population statistics
    CHECK(loss_mse(infer(res.params, x), y, mask) < 1e-3);

    auto res2 = train(spec, x, y, mask, h);
    CHECK(res2.params.layers[1].fc.w.a == res.params.layers[1].fc.w.a);
    CHECK(res2.params.layers[0].bn.running_mean == res.params.layers[0].bn.running_mean);
}

TEST_CASE("BN running moments converge to population moments") {
    MLPSpec spec;
    spec.input_dim = 2;
    spec.trunk = {LayerSpec::bn(), LayerSpec::fc(1)};
    auto p = init(spec, 1);
    rng::Stream rs(77);
    for (int it = 0; it < 800; ++it) {
        Matrix x(64, 2);
        for (int r = 0; r < 64; ++r) {
            x(r, 0) = rs.gaussian(3.0, 2.0);
            x(r, 1) = rs.gaussian(-1.0, 0.5);
        }
        forward(p, x, Mode::Train);
    }
    const auto& bn = p.layers[0].bn;
    CHECK(bn.running_mean[0] == doctest::Approx(3.0).epsilon(0.05));
    CHECK(bn.running_var[0] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(bn.running_mean[1] == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(bn.running_var[1] == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("save/load: bit-exact round trip, truncation, bad magic") {
    auto spec = mo_spec(4);
    rng::Stream rs(21);
    const int n = 64;
    Matrix x(n, spec.input_dim), y(n, spec.output_dim());
    for (auto& v : x.a) v = rs.uniform(-1, 1);
    for (auto& v : y.a) v = rs.uniform(-1, 1);
    std::vector<std::uint8_t> mask(y.a.size(), 1);
    TrainHyper h;
    h.iters = 5;
    h.batch = 32;
    auto res = train(spec, x, y, mask, h);

    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "aanet_model_test.bin";
    save_model(res.params, path);
    auto back = load_model(path);
    CHECK(back.spec == res.params.spec);
    REQUIRE(back.layers.size() == res.params.layers.size());
    for (std::size_t i = 0; i < back.layers.size(); ++i) {
        const auto& a = back.layers[i];
        const auto& b = res.params.layers[i];
        if (a.kind == LayerKind::FullyConnected) {
            CHECK(a.fc.w.a == b.fc.w.a);
            CHECK(a.fc.b == b.fc.b);
        } else if (a.kind == LayerKind::BatchNorm) {
            CHECK(a.bn.gamma == b.bn.gamma);
            CHECK(a.bn.running_mean == b.bn.running_mean);
            CHECK(a.bn.running_var == b.bn.running_var);
        }
    }

    // truncated copy
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    const auto trunc_path = dir / "aanet_model_trunc.bin";
    std::ofstream out(trunc_path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_model(trunc_path), DataError);

    const auto bad_path = dir / "aanet_model_bad.bin";
    std::ofstream bad(bad_path, std::ios::binary);
    bad << "NOTAMODELFILE________";
    bad.close();
    CHECK_THROWS_AS(load_model(bad_path), DataError);

    std::filesystem::remove(path);
    std::filesystem::remove(trunc_path);
    std::filesystem::remove(bad_path);
}
