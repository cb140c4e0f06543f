#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace aanet::nn {

// Row-major dense matrix; batches are rows.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const {
        return a[static_cast<std::size_t>(r) * cols + c];
    }
    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
};

enum class LayerKind : std::uint8_t { FullyConnected = 0, BatchNorm = 1, ReLU = 2 };

struct LayerSpec {
    LayerKind kind = LayerKind::ReLU;
    int out_dim = 0; // FullyConnected only

    static LayerSpec fc(int out) { return {LayerKind::FullyConnected, out}; }
    static LayerSpec bn() { return {LayerKind::BatchNorm, 0}; }
    static LayerSpec relu() { return {LayerKind::ReLU, 0}; }

    bool operator==(const LayerSpec&) const = default;
};

// Trunk followed by optional parallel output streams whose outputs are
// concatenated (delay/capacity/lifetime heads of the multi-objective net).
struct MLPSpec {
    int input_dim = 0;
    std::vector<LayerSpec> trunk;
    std::vector<std::vector<LayerSpec>> streams;

    int output_dim() const;
    bool operator==(const MLPSpec&) const = default;
};

// input BN, two FC(100)+BN+ReLU blocks, FC head of width K; input 3(K+2).
MLPSpec so_spec(int K);
// input 5(K+2)+2, trunk FC(300) blocks, three streams FC(100)+BN+ReLU+FC(K).
MLPSpec mo_spec(int K);

struct FCParams {
    Matrix w; // out x in
    std::vector<double> b;
};

struct BNParams {
    std::vector<double> gamma, beta, running_mean, running_var;
    double eps = 1e-5;
    double momentum = 0.99;
};

struct LayerParams {
    LayerKind kind = LayerKind::ReLU;
    int dim_in = 0, dim_out = 0;
    FCParams fc;
    BNParams bn;
};

struct MLPParams {
    MLPSpec spec;
    std::vector<LayerParams> layers; // trunk, then streams back to back
    int trunk_len = 0;
    std::vector<int> stream_len;
    std::vector<int> stream_out;
};

std::size_t trainable_param_count(const MLPParams& p);

// He-normal hidden FC weights, uniform [-3e-3, 3e-3] output FC weights and
// biases, identity-initialized batch norm.  Deterministic per seed.
MLPParams init(const MLPSpec& spec, std::uint64_t seed);

enum class Mode { Train, Infer };

// Caches captured by a Train-mode forward pass for backpropagation.
struct ForwardTrace {
    std::vector<Matrix> inputs;   // input of each executed layer
    std::vector<Matrix> bn_xhat;  // normalized activations (BN layers)
    std::vector<std::vector<double>> bn_inv_std;
    Matrix trunk_out;
};

// Train mode normalizes by batch moments and updates the running moments;
// Infer normalizes by the running moments.  Train requires batch >= 2.
Matrix forward(MLPParams& p, const Matrix& batch, Mode mode,
               ForwardTrace* trace = nullptr);
Matrix infer(const MLPParams& p, const Matrix& batch);

// Mean of squared differences over unmasked entries.  mask is row-major
// rows*cols with nonzero marking entries that count.
double loss_mse(const Matrix& pred, const Matrix& target,
                const std::vector<std::uint8_t>& mask);
Matrix loss_mse_grad(const Matrix& pred, const Matrix& target,
                     const std::vector<std::uint8_t>& mask,
                     double* loss_out = nullptr);

struct LayerGrads {
    Matrix dw;
    std::vector<double> db;
    std::vector<double> dgamma, dbeta;
};

using Gradients = std::vector<LayerGrads>;

// Exact reverse-mode gradients of the traced forward pass.
Gradients backward(const MLPParams& p, const ForwardTrace& trace, const Matrix& dout);

struct AdamState {
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;
    Gradients m, v;
};

AdamState make_adam(const MLPParams& p, double lr = 1e-3);
void adam_step(MLPParams& p, const Gradients& g, AdamState& st);

struct TrainHyper {
    double lr = 1e-3;
    int batch = 1000;
    int iters = 2000;
    std::uint64_t seed = 0;
};

struct TrainResult {
    MLPParams params;
    std::vector<double> loss_curve;
};

// Shuffled mini-batches, forward(Train) -> backward -> adam_step.
TrainResult train(const MLPSpec& spec, const Matrix& x, const Matrix& y,
                  const std::vector<std::uint8_t>& mask, const TrainHyper& h);

// Self-describing little-endian binary container; round trips bit-exactly.
void save_model(const MLPParams& p, const std::filesystem::path& path);
MLPParams load_model(const std::filesystem::path& path);

} // namespace aanet::nn
