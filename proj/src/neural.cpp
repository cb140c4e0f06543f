#include "aanet/neural.hpp"

#include "aanet/errors.hpp"
#include "aanet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace aanet::nn {

namespace {

// y[n,o] = sum_k x[n,k] * w[o,k] + b[o]
void fc_forward(const Matrix& x, const FCParams& p, Matrix& y) {
    const int n = x.rows, in = x.cols, out = p.w.rows;
    y = Matrix(n, out);
    for (int r = 0; r < n; ++r) {
        const double* xr = x.row(r);
        double* yr = y.row(r);
        for (int o = 0; o < out; ++o) {
            const double* wr = p.w.row(o);
            double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
            int k = 0;
            for (; k + 4 <= in; k += 4) {
                s0 += xr[k] * wr[k];
                s1 += xr[k + 1] * wr[k + 1];
                s2 += xr[k + 2] * wr[k + 2];
                s3 += xr[k + 3] * wr[k + 3];
            }
            double s = s0 + s1 + s2 + s3;
            for (; k < in; ++k) s += xr[k] * wr[k];
            yr[o] = s + p.b[o];
        }
    }
}

void fc_backward(const Matrix& x, const FCParams& p, const Matrix& dy,
                 LayerGrads& g, Matrix& dx) {
    const int n = x.rows, in = x.cols, out = p.w.rows;
    g.dw = Matrix(out, in);
    g.db.assign(out, 0.0);
    dx = Matrix(n, in);
    for (int r = 0; r < n; ++r) {
        const double* xr = x.row(r);
        const double* dyr = dy.row(r);
        double* dxr = dx.row(r);
        for (int o = 0; o < out; ++o) {
            const double d = dyr[o];
            if (d == 0.0) continue;
            g.db[o] += d;
            double* dwr = g.dw.row(o);
            const double* wr = p.w.row(o);
            for (int k = 0; k < in; ++k) {
                dwr[k] += d * xr[k];
                dxr[k] += d * wr[k];
            }
        }
    }
}

void bn_forward_train(const Matrix& x, BNParams& p, Matrix& y, Matrix& xhat,
                      std::vector<double>& inv_std) {
    const int n = x.rows, f = x.cols;
    y = Matrix(n, f);
    xhat = Matrix(n, f);
    inv_std.assign(f, 0.0);
    for (int c = 0; c < f; ++c) {
        double mean = 0.0;
        for (int r = 0; r < n; ++r) mean += x(r, c);
        mean /= n;
        double var = 0.0;
        for (int r = 0; r < n; ++r) {
            const double d = x(r, c) - mean;
            var += d * d;
        }
        var /= n;
        const double is = 1.0 / std::sqrt(var + p.eps);
        inv_std[c] = is;
        for (int r = 0; r < n; ++r) {
            const double xh = (x(r, c) - mean) * is;
            xhat(r, c) = xh;
            y(r, c) = p.gamma[c] * xh + p.beta[c];
        }
        p.running_mean[c] = p.momentum * p.running_mean[c] + (1.0 - p.momentum) * mean;
        p.running_var[c] = p.momentum * p.running_var[c] + (1.0 - p.momentum) * var;
    }
}

void bn_forward_infer(const Matrix& x, const BNParams& p, Matrix& y) {
    const int n = x.rows, f = x.cols;
    y = Matrix(n, f);
    for (int c = 0; c < f; ++c) {
        const double is = 1.0 / std::sqrt(p.running_var[c] + p.eps);
        for (int r = 0; r < n; ++r)
            y(r, c) = p.gamma[c] * (x(r, c) - p.running_mean[c]) * is + p.beta[c];
    }
}

void bn_backward(const BNParams& p, const Matrix& xhat,
                 const std::vector<double>& inv_std, const Matrix& dy,
                 LayerGrads& g, Matrix& dx) {
    const int n = dy.rows, f = dy.cols;
    g.dgamma.assign(f, 0.0);
    g.dbeta.assign(f, 0.0);
    dx = Matrix(n, f);
    for (int c = 0; c < f; ++c) {
        double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
        for (int r = 0; r < n; ++r) {
            const double d = dy(r, c);
            g.dgamma[c] += d * xhat(r, c);
            g.dbeta[c] += d;
            const double dxh = d * p.gamma[c];
            sum_dxhat += dxh;
            sum_dxhat_xhat += dxh * xhat(r, c);
        }
        const double scale = inv_std[c] / n;
        for (int r = 0; r < n; ++r) {
            const double dxh = dy(r, c) * p.gamma[c];
            dx(r, c) = scale * (n * dxh - sum_dxhat - xhat(r, c) * sum_dxhat_xhat);
        }
    }
}

void relu_forward(const Matrix& x, Matrix& y) {
    y = x;
    for (double& v : y.a) v = std::max(v, 0.0);
}

void relu_backward(const Matrix& x, const Matrix& dy, Matrix& dx) {
    dx = dy;
    for (std::size_t i = 0; i < dx.a.size(); ++i)
        if (x.a[i] <= 0.0) dx.a[i] = 0.0;
}

std::vector<int> chain_dims(int input_dim, const std::vector<LayerSpec>& layers) {
    std::vector<int> dims{input_dim};
    for (const auto& l : layers) {
        const int in = dims.back();
        if (l.kind == LayerKind::FullyConnected) {
            if (l.out_dim <= 0) throw ConfigError("FC layer needs positive out_dim");
            dims.push_back(l.out_dim);
        } else {
            dims.push_back(in);
        }
    }
    return dims;
}

void validate_spec(const MLPSpec& spec) {
    if (spec.input_dim <= 0) throw ConfigError("spec: input_dim must be positive");
    bool has_fc = false;
    for (const auto& l : spec.trunk) has_fc |= l.kind == LayerKind::FullyConnected;
    for (const auto& s : spec.streams) {
        if (s.empty()) throw ConfigError("spec: empty stream");
        for (const auto& l : s) has_fc |= l.kind == LayerKind::FullyConnected;
    }
    if (!has_fc) throw ConfigError("spec: at least one FC layer required");
}

} // namespace

int MLPSpec::output_dim() const {
    const auto trunk_dims = chain_dims(input_dim, trunk);
    if (streams.empty()) return trunk_dims.back();
    int total = 0;
    for (const auto& s : streams) total += chain_dims(trunk_dims.back(), s).back();
    return total;
}

MLPSpec so_spec(int K) {
    MLPSpec s;
    s.input_dim = 3 * (K + 2);
    s.trunk = {LayerSpec::bn(),  LayerSpec::fc(100), LayerSpec::bn(),
               LayerSpec::relu(), LayerSpec::fc(100), LayerSpec::bn(),
               LayerSpec::relu(), LayerSpec::fc(K)};
    return s;
}

MLPSpec mo_spec(int K) {
    MLPSpec s;
    s.input_dim = 5 * (K + 2) + 2;
    s.trunk = {LayerSpec::bn(),  LayerSpec::fc(300), LayerSpec::bn(),
               LayerSpec::relu(), LayerSpec::fc(300), LayerSpec::bn(),
               LayerSpec::relu()};
    const std::vector<LayerSpec> head = {LayerSpec::fc(100), LayerSpec::bn(),
                                         LayerSpec::relu(), LayerSpec::fc(K)};
    s.streams = {head, head, head};
    return s;
}

std::size_t trainable_param_count(const MLPParams& p) {
    std::size_t n = 0;
    for (const auto& l : p.layers) {
        if (l.kind == LayerKind::FullyConnected)
            n += l.fc.w.a.size() + l.fc.b.size();
        else if (l.kind == LayerKind::BatchNorm)
            n += l.bn.gamma.size() + l.bn.beta.size();
    }
    return n;
}

MLPParams init(const MLPSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    MLPParams p;
    p.spec = spec;

    auto append = [&](const std::vector<LayerSpec>& layers, int in_dim) {
        const auto dims = chain_dims(in_dim, layers);
        // the last FC of this chain is an output head when the chain ends
        // the network (streams, or the trunk of a single-headed net)
        int last_fc = -1;
        for (int i = 0; i < static_cast<int>(layers.size()); ++i)
            if (layers[i].kind == LayerKind::FullyConnected) last_fc = i;
        for (int i = 0; i < static_cast<int>(layers.size()); ++i) {
            LayerParams lp;
            lp.kind = layers[i].kind;
            lp.dim_in = dims[i];
            lp.dim_out = dims[i + 1];
            p.layers.push_back(std::move(lp));
        }
        return last_fc;
    };

    int trunk_last_fc = append(spec.trunk, spec.input_dim);
    p.trunk_len = static_cast<int>(spec.trunk.size());
    const int trunk_out =
        p.trunk_len == 0 ? spec.input_dim : p.layers[p.trunk_len - 1].dim_out;
    std::vector<int> head_fc; // flattened indices of output FC layers
    if (spec.streams.empty()) {
        if (trunk_last_fc >= 0) head_fc.push_back(trunk_last_fc);
    } else {
        for (const auto& s : spec.streams) {
            const int base = static_cast<int>(p.layers.size());
            const int last = append(s, trunk_out);
            p.stream_len.push_back(static_cast<int>(s.size()));
            p.stream_out.push_back(p.layers.back().dim_out);
            if (last >= 0) head_fc.push_back(base + last);
        }
    }

    for (int i = 0; i < static_cast<int>(p.layers.size()); ++i) {
        auto& l = p.layers[i];
        rng::Stream rs(rng::substream(seed, "init-layer", static_cast<std::uint64_t>(i)));
        if (l.kind == LayerKind::FullyConnected) {
            l.fc.w = Matrix(l.dim_out, l.dim_in);
            l.fc.b.assign(l.dim_out, 0.0);
            const bool is_head =
                std::find(head_fc.begin(), head_fc.end(), i) != head_fc.end();
            if (is_head) {
                for (double& v : l.fc.w.a) v = rs.uniform(-3e-3, 3e-3);
                for (double& v : l.fc.b) v = rs.uniform(-3e-3, 3e-3);
            } else {
                const double std = std::sqrt(2.0 / l.dim_in);
                for (double& v : l.fc.w.a) v = rs.gaussian(0.0, std);
            }
        } else if (l.kind == LayerKind::BatchNorm) {
            l.bn.gamma.assign(l.dim_in, 1.0);
            l.bn.beta.assign(l.dim_in, 0.0);
            l.bn.running_mean.assign(l.dim_in, 0.0);
            l.bn.running_var.assign(l.dim_in, 1.0);
        }
    }
    return p;
}

namespace {

Matrix run_chain(MLPParams& p, int begin, int count, const Matrix& in, Mode mode,
                 ForwardTrace* trace) {
    Matrix cur = in;
    for (int i = begin; i < begin + count; ++i) {
        auto& l = p.layers[i];
        if (cur.cols != l.dim_in) throw ConfigError("forward: shape mismatch");
        if (trace) trace->inputs[i] = cur;
        Matrix next;
        switch (l.kind) {
        case LayerKind::FullyConnected:
            fc_forward(cur, l.fc, next);
            break;
        case LayerKind::BatchNorm:
            if (mode == Mode::Train) {
                Matrix xhat;
                std::vector<double> inv_std;
                bn_forward_train(cur, l.bn, next, xhat, inv_std);
                if (trace) {
                    trace->bn_xhat[i] = std::move(xhat);
                    trace->bn_inv_std[i] = std::move(inv_std);
                }
            } else {
                bn_forward_infer(cur, l.bn, next);
            }
            break;
        case LayerKind::ReLU:
            relu_forward(cur, next);
            break;
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace

Matrix forward(MLPParams& p, const Matrix& batch, Mode mode, ForwardTrace* trace) {
    if (batch.cols != p.spec.input_dim) throw ConfigError("forward: batch width mismatch");
    if (mode == Mode::Train && batch.rows < 2)
        throw ConfigError("forward: Train mode requires batch size >= 2");
    if (trace) {
        trace->inputs.assign(p.layers.size(), Matrix());
        trace->bn_xhat.assign(p.layers.size(), Matrix());
        trace->bn_inv_std.assign(p.layers.size(), {});
    }

    Matrix t = run_chain(p, 0, p.trunk_len, batch, mode, trace);
    if (p.spec.streams.empty()) return t;
    if (trace) trace->trunk_out = t;

    Matrix out(batch.rows, p.spec.output_dim());
    int col = 0;
    int base = p.trunk_len;
    for (std::size_t s = 0; s < p.stream_len.size(); ++s) {
        Matrix y = run_chain(p, base, p.stream_len[s], t, mode, trace);
        for (int r = 0; r < y.rows; ++r)
            std::memcpy(out.row(r) + col, y.row(r), sizeof(double) * y.cols);
        col += y.cols;
        base += p.stream_len[s];
    }
    return out;
}

Matrix infer(const MLPParams& p, const Matrix& batch) {
    // running stats are read-only in Infer mode
    return forward(const_cast<MLPParams&>(p), batch, Mode::Infer, nullptr);
}

double loss_mse(const Matrix& pred, const Matrix& target,
                const std::vector<std::uint8_t>& mask) {
    double l = 0.0;
    loss_mse_grad(pred, target, mask, &l);
    return l;
}

Matrix loss_mse_grad(const Matrix& pred, const Matrix& target,
                     const std::vector<std::uint8_t>& mask, double* loss_out) {
    if (pred.rows != target.rows || pred.cols != target.cols)
        throw ConfigError("loss_mse: shape mismatch");
    if (mask.size() != pred.a.size()) throw ConfigError("loss_mse: mask size mismatch");
    std::size_t count = 0;
    for (auto m : mask) count += m ? 1 : 0;
    if (count == 0) throw ConfigError("loss_mse: empty mask");

    Matrix g(pred.rows, pred.cols);
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.a.size(); ++i) {
        if (!mask[i]) continue;
        const double d = pred.a[i] - target.a[i];
        loss += d * d;
        g.a[i] = 2.0 * d / static_cast<double>(count);
    }
    if (loss_out) *loss_out = loss / static_cast<double>(count);
    return g;
}

namespace {

void chain_backward(const MLPParams& p, const ForwardTrace& trace, int begin,
                    int count, const Matrix& dout, Gradients& g, Matrix& din) {
    Matrix cur = dout;
    for (int i = begin + count - 1; i >= begin; --i) {
        const auto& l = p.layers[i];
        Matrix dx;
        switch (l.kind) {
        case LayerKind::FullyConnected:
            fc_backward(trace.inputs[i], l.fc, cur, g[i], dx);
            break;
        case LayerKind::BatchNorm:
            bn_backward(l.bn, trace.bn_xhat[i], trace.bn_inv_std[i], cur, g[i], dx);
            break;
        case LayerKind::ReLU:
            relu_backward(trace.inputs[i], cur, dx);
            break;
        }
        cur = std::move(dx);
    }
    din = std::move(cur);
}

} // namespace

Gradients backward(const MLPParams& p, const ForwardTrace& trace, const Matrix& dout) {
    Gradients g(p.layers.size());
    Matrix dtrunk_out;
    if (p.spec.streams.empty()) {
        Matrix din;
        chain_backward(p, trace, 0, p.trunk_len, dout, g, din);
        return g;
    }
    // split dout by stream and accumulate into the trunk output gradient
    dtrunk_out = Matrix(dout.rows, trace.trunk_out.cols);
    int col = 0;
    int base = p.trunk_len;
    for (std::size_t s = 0; s < p.stream_len.size(); ++s) {
        Matrix ds(dout.rows, p.stream_out[s]);
        for (int r = 0; r < dout.rows; ++r)
            std::memcpy(ds.row(r), dout.row(r) + col, sizeof(double) * ds.cols);
        Matrix din;
        chain_backward(p, trace, base, p.stream_len[s], ds, g, din);
        for (std::size_t i = 0; i < din.a.size(); ++i) dtrunk_out.a[i] += din.a[i];
        col += p.stream_out[s];
        base += p.stream_len[s];
    }
    Matrix din;
    chain_backward(p, trace, 0, p.trunk_len, dtrunk_out, g, din);
    return g;
}

AdamState make_adam(const MLPParams& p, double lr) {
    AdamState st;
    st.lr = lr;
    st.m.resize(p.layers.size());
    st.v.resize(p.layers.size());
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        const auto& l = p.layers[i];
        if (l.kind == LayerKind::FullyConnected) {
            st.m[i].dw = Matrix(l.fc.w.rows, l.fc.w.cols);
            st.m[i].db.assign(l.fc.b.size(), 0.0);
            st.v[i].dw = Matrix(l.fc.w.rows, l.fc.w.cols);
            st.v[i].db.assign(l.fc.b.size(), 0.0);
        } else if (l.kind == LayerKind::BatchNorm) {
            st.m[i].dgamma.assign(l.bn.gamma.size(), 0.0);
            st.m[i].dbeta.assign(l.bn.beta.size(), 0.0);
            st.v[i].dgamma.assign(l.bn.gamma.size(), 0.0);
            st.v[i].dbeta.assign(l.bn.beta.size(), 0.0);
        }
    }
    return st;
}

namespace {

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 std::vector<double>& m, std::vector<double>& v, const AdamState& st,
                 double bc1, double bc2) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * grad[i];
        v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * grad[i] * grad[i];
        const double mh = m[i] / bc1;
        const double vh = v[i] / bc2;
        param[i] -= st.lr * mh / (std::sqrt(vh) + st.eps);
    }
}

} // namespace

void adam_step(MLPParams& p, const Gradients& g, AdamState& st) {
    if (g.size() != p.layers.size()) throw ConfigError("adam_step: gradient shape mismatch");
    ++st.step;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        auto& l = p.layers[i];
        if (l.kind == LayerKind::FullyConnected) {
            adam_update(l.fc.w.a, g[i].dw.a, st.m[i].dw.a, st.v[i].dw.a, st, bc1, bc2);
            adam_update(l.fc.b, g[i].db, st.m[i].db, st.v[i].db, st, bc1, bc2);
        } else if (l.kind == LayerKind::BatchNorm) {
            adam_update(l.bn.gamma, g[i].dgamma, st.m[i].dgamma, st.v[i].dgamma, st, bc1, bc2);
            adam_update(l.bn.beta, g[i].dbeta, st.m[i].dbeta, st.v[i].dbeta, st, bc1, bc2);
        }
    }
}

TrainResult train(const MLPSpec& spec, const Matrix& x, const Matrix& y,
                  const std::vector<std::uint8_t>& mask, const TrainHyper& h) {
    if (x.rows == 0) throw ConfigError("train: empty dataset");
    if (x.rows != y.rows) throw ConfigError("train: feature/label row mismatch");
    if (mask.size() != y.a.size()) throw ConfigError("train: mask shape mismatch");

    TrainResult res;
    res.params = init(spec, rng::substream(h.seed, "init"));
    AdamState adam = make_adam(res.params, h.lr);
    rng::Stream shuffle(rng::substream(h.seed, "shuffle"));

    const int n = x.rows;
    const int bsz = std::max(2, std::min(h.batch, n));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t cursor = perm.size(); // trigger reshuffle on first use

    Matrix bx(bsz, x.cols), by(bsz, y.cols);
    std::vector<std::uint8_t> bmask(static_cast<std::size_t>(bsz) * y.cols);

    for (int it = 0; it < h.iters; ++it) {
        for (int r = 0; r < bsz; ++r) {
            if (cursor >= perm.size()) {
                for (std::size_t i = perm.size(); i > 1; --i)
                    std::swap(perm[i - 1],
                              perm[static_cast<std::size_t>(shuffle.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
                cursor = 0;
            }
            const int src = perm[cursor++];
            std::memcpy(bx.row(r), x.row(src), sizeof(double) * x.cols);
            std::memcpy(by.row(r), y.row(src), sizeof(double) * y.cols);
            std::memcpy(bmask.data() + static_cast<std::size_t>(r) * y.cols,
                        mask.data() + static_cast<std::size_t>(src) * y.cols, y.cols);
        }
        ForwardTrace trace;
        Matrix pred = forward(res.params, bx, Mode::Train, &trace);
        double loss = 0.0;
        Matrix dpred = loss_mse_grad(pred, by, bmask, &loss);
        Gradients g = backward(res.params, trace, dpred);
        adam_step(res.params, g, adam);
        res.loss_curve.push_back(loss);
    }
    return res;
}

namespace {

constexpr char kMagic[8] = {'A', 'A', 'N', 'E', 'T', 'M', 'L', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_doubles(std::ofstream& out, const double* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw DataError("model file truncated");
    return v;
}

void get_doubles(std::ifstream& in, double* p, std::size_t n) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw DataError("model file truncated");
}

void put_layers(std::ofstream& out, const std::vector<LayerSpec>& ls) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ls.size()));
    for (const auto& l : ls) {
        put<std::uint8_t>(out, static_cast<std::uint8_t>(l.kind));
        put<std::int32_t>(out, l.out_dim);
    }
}

std::vector<LayerSpec> get_layers(std::ifstream& in) {
    const auto n = get<std::uint32_t>(in);
    if (n > 1000) throw DataError("model file corrupt: layer count");
    std::vector<LayerSpec> ls(n);
    for (auto& l : ls) {
        const auto kind = get<std::uint8_t>(in);
        if (kind > 2) throw DataError("model file corrupt: layer kind");
        l.kind = static_cast<LayerKind>(kind);
        l.out_dim = get<std::int32_t>(in);
    }
    return ls;
}

} // namespace

void save_model(const MLPParams& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kVersion);
    put<std::int32_t>(out, p.spec.input_dim);
    put_layers(out, p.spec.trunk);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.spec.streams.size()));
    for (const auto& s : p.spec.streams) put_layers(out, s);
    for (const auto& l : p.layers) {
        if (l.kind == LayerKind::FullyConnected) {
            put_doubles(out, l.fc.w.a.data(), l.fc.w.a.size());
            put_doubles(out, l.fc.b.data(), l.fc.b.size());
        } else if (l.kind == LayerKind::BatchNorm) {
            put_doubles(out, l.bn.gamma.data(), l.bn.gamma.size());
            put_doubles(out, l.bn.beta.data(), l.bn.beta.size());
            put_doubles(out, l.bn.running_mean.data(), l.bn.running_mean.size());
            put_doubles(out, l.bn.running_var.data(), l.bn.running_var.size());
            put<double>(out, l.bn.eps);
            put<double>(out, l.bn.momentum);
        }
    }
    if (!out) throw DataError("write failed for " + path.string());
}

MLPParams load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw DataError("not a model file: " + path.string());
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion)
        throw DataError("unsupported model version " + std::to_string(version));

    MLPSpec spec;
    spec.input_dim = get<std::int32_t>(in);
    spec.trunk = get_layers(in);
    const auto n_streams = get<std::uint32_t>(in);
    if (n_streams > 64) throw DataError("model file corrupt: stream count");
    for (std::uint32_t s = 0; s < n_streams; ++s) spec.streams.push_back(get_layers(in));

    // rebuild the layout, then overwrite parameters from the file
    MLPParams p = init(spec, 0);
    for (auto& l : p.layers) {
        if (l.kind == LayerKind::FullyConnected) {
            get_doubles(in, l.fc.w.a.data(), l.fc.w.a.size());
            get_doubles(in, l.fc.b.data(), l.fc.b.size());
        } else if (l.kind == LayerKind::BatchNorm) {
            get_doubles(in, l.bn.gamma.data(), l.bn.gamma.size());
            get_doubles(in, l.bn.beta.data(), l.bn.beta.size());
            get_doubles(in, l.bn.running_mean.data(), l.bn.running_mean.size());
            get_doubles(in, l.bn.running_var.data(), l.bn.running_var.size());
            l.bn.eps = get<double>(in);
            l.bn.momentum = get<double>(in);
        }
    }
    return p;
}

} // namespace aanet::nn
