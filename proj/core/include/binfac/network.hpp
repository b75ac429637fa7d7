#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "binfac/bit_hash.hpp"
#include "binfac/dataset.hpp"
#include "binfac/matrix.hpp"
#include "binfac/rng.hpp"
#include "binfac/sign_matrix.hpp"

namespace binfac {

enum class TrainPhase : std::uint8_t { Relaxed = 0, FrozenBinary = 1 };

// Layer dimensions plus the factorization mask: factorize_mask[l] marks
// weight matrix l (of shape layer_dims[l+1] x layer_dims[l]) as
// factorized. inner_ranks holds one entry per weight matrix; 0 selects
// the default rank ceil(min(n, m) / 2). Hidden activations are ReLU,
// the output is raw logits (softmax lives inside the loss).
struct NetworkSpec {
    std::vector<std::size_t> layer_dims;
    std::vector<bool> factorize_mask;
    std::vector<std::size_t> inner_ranks;

    std::size_t num_weight_matrices() const {
        return layer_dims.empty() ? 0 : layer_dims.size() - 1;
    }

    std::size_t out_dim(std::size_t layer) const { return layer_dims[layer + 1]; }
    std::size_t in_dim(std::size_t layer) const { return layer_dims[layer]; }

    std::size_t resolved_rank(std::size_t layer) const {
        const std::size_t given = layer < inner_ranks.size() ? inner_ranks[layer] : 0;
        if (given != 0) return given;
        const std::size_t n = out_dim(layer);
        const std::size_t m = in_dim(layer);
        return (std::min(n, m) + 1) / 2;
    }

    void validate() const {
        if (layer_dims.empty()) throw ConfigError("NetworkSpec: layer_dims is empty");
        for (const std::size_t d : layer_dims)
            if (d == 0) throw ConfigError("NetworkSpec: zero layer dimension");
        if (factorize_mask.size() != num_weight_matrices())
            throw ConfigError("NetworkSpec: mask length " +
                              std::to_string(factorize_mask.size()) + " does not match " +
                              std::to_string(num_weight_matrices()) + " weight matrices");
        if (!inner_ranks.empty() && inner_ranks.size() != num_weight_matrices())
            throw ConfigError("NetworkSpec: inner_ranks length does not match weight matrices");
        for (std::size_t l = 0; l < num_weight_matrices(); ++l) {
            if (!factorize_mask[l]) continue;
            const std::size_t r = resolved_rank(l);
            if (r < 1 || r > out_dim(l))
                throw ConfigError("NetworkSpec: rank " + std::to_string(r) + " for layer " +
                                  std::to_string(l) + " outside [1, " +
                                  std::to_string(out_dim(l)) + "]");
        }
    }
};

template <typename T>
struct DenseLayer {
    Matrix<T> w; // n x m
    std::vector<T> bias; // n
};

template <typename T>
struct FactorizedLayer {
    Matrix<T> z; // n x r; real-valued in [-1,1] while relaxed, exactly {0,1} once frozen
    Matrix<T> a; // r x m
    std::vector<T> bias; // n
};

template <typename T>
using LayerState = std::variant<DenseLayer<T>, FactorizedLayer<T>>;

template <typename T>
struct Network {
    NetworkSpec spec;
    std::vector<LayerState<T>> layers;
    TrainPhase phase = TrainPhase::Relaxed;

    std::size_t input_dim() const { return spec.layer_dims.front(); }
    std::size_t output_dim() const { return spec.layer_dims.back(); }
};

using Networkf = Network<float>;
using Networkd = Network<double>;

// ---------------------------------------------------------------------------
// Initialization

// Z entries are drawn from {-1,+1} with p = 0.5 (so they already satisfy
// both relaxation constraints and ||Z||_F^2 == n*r exactly); A entries are
// Normal(0, 2/(fan_in * r)) so Var(ZA) matches the He initialization of
// the dense counterpart, which uses Normal(0, 2/fan_in). Biases start at
// zero. Draw order: layers in order; Z row-major, then A row-major.
template <typename T>
Network<T> init_network(const NetworkSpec& spec, Rng& rng) {
    spec.validate();
    Network<T> net;
    net.spec = spec;
    net.phase = TrainPhase::Relaxed;
    for (std::size_t l = 0; l < spec.num_weight_matrices(); ++l) {
        const std::size_t n = spec.out_dim(l);
        const std::size_t m = spec.in_dim(l);
        if (spec.factorize_mask[l]) {
            const std::size_t r = spec.resolved_rank(l);
            FactorizedLayer<T> layer;
            layer.z = Matrix<T>(n, r);
            for (std::size_t i = 0; i < n * r; ++i)
                layer.z.data()[i] = rng.next_double() < 0.5 ? T(1) : T(-1);
            layer.a = Matrix<T>(r, m);
            const double stddev = std::sqrt(2.0 / (static_cast<double>(m) * static_cast<double>(r)));
            for (std::size_t i = 0; i < r * m; ++i)
                layer.a.data()[i] = static_cast<T>(stddev * rng.next_normal());
            layer.bias.assign(n, T(0));
            net.layers.emplace_back(std::move(layer));
        } else {
            DenseLayer<T> layer;
            layer.w = Matrix<T>(n, m);
            const double stddev = std::sqrt(2.0 / static_cast<double>(m));
            for (std::size_t i = 0; i < n * m; ++i)
                layer.w.data()[i] = static_cast<T>(stddev * rng.next_normal());
            layer.bias.assign(n, T(0));
            net.layers.emplace_back(std::move(layer));
        }
    }
    return net;
}

// ---------------------------------------------------------------------------
// Forward pass

namespace detail {

template <typename T>
void add_bias_rows(Matrix<T>& m, const std::vector<T>& bias) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        T* row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] += bias[j];
    }
}

template <typename T>
void relu_inplace(Matrix<T>& m) {
    for (T& v : m.values())
        if (v < T(0)) v = T(0);
}

// Pre-activation of one layer for a row-major batch X (B x m): dense is
// X W^T + b; factorized is (X A^T) Z^T + b, two thin products that never
// materialize ZA. Returns the factor midpoint U = X A^T when asked.
template <typename T>
Matrix<T> layer_preactivation(const LayerState<T>& layer, const Matrix<T>& x,
                              Matrix<T>* factor_mid = nullptr) {
    if (const auto* dense = std::get_if<DenseLayer<T>>(&layer)) {
        Matrix<T> s = matmul_nt(x, dense->w);
        add_bias_rows(s, dense->bias);
        return s;
    }
    const auto& fac = std::get<FactorizedLayer<T>>(layer);
    Matrix<T> u = matmul_nt(x, fac.a);
    Matrix<T> s = matmul_nt(u, fac.z);
    add_bias_rows(s, fac.bias);
    if (factor_mid) *factor_mid = std::move(u);
    return s;
}

} // namespace detail

// Raw logits for a batch of rows (B x input_dim) -> (B x output_dim).
template <typename T>
Matrix<T> forward(const Network<T>& net, const Matrix<T>& batch) {
    if (batch.cols() != net.input_dim())
        throw DimensionError("forward: batch width " + std::to_string(batch.cols()) +
                             " does not match input dimension " +
                             std::to_string(net.input_dim()));
    Matrix<T> h = batch;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Matrix<T> s = detail::layer_preactivation(net.layers[l], h);
        if (l + 1 < net.layers.size()) detail::relu_inplace(s);
        h = std::move(s);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Loss and gradients

template <typename T>
struct LayerGradients {
    Matrix<T> w; // dense layers
    Matrix<T> z; // factorized layers, relaxed phase only
    Matrix<T> a; // factorized layers
    std::vector<T> bias;
};

template <typename T>
struct Gradients {
    std::vector<LayerGradients<T>> layers;
};

namespace detail {

// Mean softmax cross-entropy over the batch plus dL/dlogits, computed
// row-wise with the max-shift for stability. Loss is accumulated in
// doubles.
template <typename T>
double softmax_cross_entropy(const Matrix<T>& logits, std::span<const std::uint8_t> labels,
                             Matrix<T>& dlogits) {
    const std::size_t batch = logits.rows();
    const std::size_t classes = logits.cols();
    dlogits = Matrix<T>(batch, classes);
    double loss_sum = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const T* row = logits.row(i);
        T* grad = dlogits.row(i);
        double mx = static_cast<double>(row[0]);
        for (std::size_t c = 1; c < classes; ++c) mx = std::max(mx, static_cast<double>(row[c]));
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c) sum += std::exp(static_cast<double>(row[c]) - mx);
        const double log_sum = std::log(sum);
        const std::uint8_t y = labels[i];
        loss_sum += (mx + log_sum) - static_cast<double>(row[y]);
        for (std::size_t c = 0; c < classes; ++c) {
            const double p = std::exp(static_cast<double>(row[c]) - mx) / sum;
            grad[c] = static_cast<T>((p - (c == y ? 1.0 : 0.0)) * inv_batch);
        }
    }
    return loss_sum * inv_batch;
}

template <typename T>
std::vector<T> column_sums(const Matrix<T>& m) {
    std::vector<T> sums(m.cols(), T(0));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const T* row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) sums[j] += row[j];
    }
    return sums;
}

} // namespace detail

// Loss = mean softmax cross-entropy + lambda * sum_l layer_reg[l] * ||A_l||_1
// (the L1 penalty applies to the real factors of factorized layers only).
// Gradients come from backpropagation; factorized layers get dA and dZ via
// the thin-product chain without materializing ZA. In the FrozenBinary
// phase dZ is not produced.
template <typename T>
std::pair<double, Gradients<T>> loss_and_gradients(const Network<T>& net, const Matrix<T>& batch,
                                                   std::span<const std::uint8_t> labels,
                                                   double lambda,
                                                   std::span<const double> layer_reg = {}) {
    if (labels.size() != batch.rows())
        throw DimensionError("loss_and_gradients: label count does not match batch rows");
    if (batch.cols() != net.input_dim())
        throw DimensionError("loss_and_gradients: batch width mismatch");
    for (const std::uint8_t y : labels)
        if (y >= net.output_dim()) throw ConfigError("loss_and_gradients: label out of range");

    const std::size_t num_layers = net.layers.size();

    // Forward, keeping layer inputs, pre-activations, and factor midpoints.
    std::vector<Matrix<T>> inputs(num_layers);
    std::vector<Matrix<T>> preacts(num_layers);
    std::vector<Matrix<T>> mids(num_layers);
    Matrix<T> h = batch;
    for (std::size_t l = 0; l < num_layers; ++l) {
        inputs[l] = h;
        Matrix<T> s = detail::layer_preactivation(net.layers[l], h, &mids[l]);
        preacts[l] = s;
        if (l + 1 < num_layers) detail::relu_inplace(s);
        h = std::move(s);
    }

    Matrix<T> grad_s;
    double loss = detail::softmax_cross_entropy(h, labels, grad_s);

    double penalty = 0.0;
    if (lambda != 0.0) {
        for (std::size_t l = 0; l < num_layers; ++l) {
            if (const auto* fac = std::get_if<FactorizedLayer<T>>(&net.layers[l])) {
                const double reg = l < layer_reg.size() ? layer_reg[l] : 1.0;
                penalty += reg * l1_norm(fac->a);
            }
        }
    }
    loss += lambda * penalty;

    Gradients<T> grads;
    grads.layers.resize(num_layers);
    const bool frozen = net.phase == TrainPhase::FrozenBinary;

    for (std::size_t li = num_layers; li-- > 0;) {
        LayerGradients<T>& lg = grads.layers[li];
        lg.bias = detail::column_sums(grad_s);

        Matrix<T> grad_input;
        if (const auto* dense = std::get_if<DenseLayer<T>>(&net.layers[li])) {
            lg.w = matmul_tn(grad_s, inputs[li]);
            if (li > 0) grad_input = matmul(grad_s, dense->w);
        } else {
            const auto& fac = std::get<FactorizedLayer<T>>(net.layers[li]);
            if (!frozen) lg.z = matmul_tn(grad_s, mids[li]);
            Matrix<T> grad_mid = matmul(grad_s, fac.z);
            lg.a = matmul_tn(grad_mid, inputs[li]);
            if (lambda != 0.0) {
                const double reg = li < layer_reg.size() ? layer_reg[li] : 1.0;
                const T coeff = static_cast<T>(lambda * reg);
                for (std::size_t i = 0; i < lg.a.size(); ++i) {
                    const T v = fac.a.data()[i];
                    if (v > T(0))
                        lg.a.data()[i] += coeff;
                    else if (v < T(0))
                        lg.a.data()[i] -= coeff;
                }
            }
            if (li > 0) grad_input = matmul(grad_mid, fac.a);
        }

        if (li > 0) {
            // dL/dS_{l-1} = dL/dX_l gated by the ReLU mask.
            const Matrix<T>& s_prev = preacts[li - 1];
            for (std::size_t i = 0; i < grad_input.size(); ++i)
                if (s_prev.data()[i] <= T(0)) grad_input.data()[i] = T(0);
            grad_s = std::move(grad_input);
        }
    }

    return {loss, std::move(grads)};
}

// ---------------------------------------------------------------------------
// Adam

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <typename T>
struct AdamTensor {
    std::vector<T> m, v;
    explicit AdamTensor(std::size_t size = 0) : m(size, T(0)), v(size, T(0)) {}
};

template <typename T>
struct LayerAdam {
    AdamTensor<T> w_or_z; // dense w, or factorized z
    AdamTensor<T> a;
    AdamTensor<T> bias;
};

template <typename T>
struct AdamState {
    std::vector<LayerAdam<T>> layers;
    std::int64_t step = 0;
};

template <typename T>
AdamState<T> init_adam(const Network<T>& net) {
    AdamState<T> state;
    state.layers.reserve(net.layers.size());
    for (const LayerState<T>& layer : net.layers) {
        LayerAdam<T> la;
        if (const auto* dense = std::get_if<DenseLayer<T>>(&layer)) {
            la.w_or_z = AdamTensor<T>(dense->w.size());
            la.bias = AdamTensor<T>(dense->bias.size());
        } else {
            const auto& fac = std::get<FactorizedLayer<T>>(layer);
            la.w_or_z = AdamTensor<T>(fac.z.size());
            la.a = AdamTensor<T>(fac.a.size());
            la.bias = AdamTensor<T>(fac.bias.size());
        }
        state.layers.push_back(std::move(la));
    }
    return state;
}

namespace detail {

template <typename T>
void adam_update(T* param, const T* grad, AdamTensor<T>& st, std::size_t size, double lr,
                 double corr1, double corr2, const AdamParams& hp) {
    const T b1 = static_cast<T>(hp.beta1);
    const T b2 = static_cast<T>(hp.beta2);
    const T one_minus_b1 = static_cast<T>(1.0 - hp.beta1);
    const T one_minus_b2 = static_cast<T>(1.0 - hp.beta2);
    const T eps = static_cast<T>(hp.eps);
    const T lr_t = static_cast<T>(lr);
    const T c1 = static_cast<T>(corr1);
    const T c2 = static_cast<T>(corr2);
    for (std::size_t i = 0; i < size; ++i) {
        const T g = grad[i];
        st.m[i] = b1 * st.m[i] + one_minus_b1 * g;
        st.v[i] = b2 * st.v[i] + one_minus_b2 * g * g;
        const T mhat = st.m[i] * c1;
        const T vhat = st.v[i] * c2;
        param[i] -= lr_t * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace detail

// One Adam step with bias correction over every trainable tensor.
// Tensors without gradients (frozen Z) are left untouched.
template <typename T>
void adam_step(Network<T>& net, const Gradients<T>& grads, AdamState<T>& state, double lr,
               const AdamParams& hp = {}) {
    if (grads.layers.size() != net.layers.size())
        throw DimensionError("adam_step: gradient layer count mismatch");
    state.step += 1;
    const double corr1 = 1.0 / (1.0 - std::pow(hp.beta1, static_cast<double>(state.step)));
    const double corr2 = 1.0 / (1.0 - std::pow(hp.beta2, static_cast<double>(state.step)));

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const LayerGradients<T>& lg = grads.layers[l];
        LayerAdam<T>& la = state.layers[l];
        if (auto* dense = std::get_if<DenseLayer<T>>(&net.layers[l])) {
            detail::adam_update(dense->w.data(), lg.w.data(), la.w_or_z, dense->w.size(), lr,
                                corr1, corr2, hp);
            detail::adam_update(dense->bias.data(), lg.bias.data(), la.bias, dense->bias.size(),
                                lr, corr1, corr2, hp);
        } else {
            auto& fac = std::get<FactorizedLayer<T>>(net.layers[l]);
            if (!lg.z.empty())
                detail::adam_update(fac.z.data(), lg.z.data(), la.w_or_z, fac.z.size(), lr, corr1,
                                    corr2, hp);
            detail::adam_update(fac.a.data(), lg.a.data(), la.a, fac.a.size(), lr, corr1, corr2,
                                hp);
            detail::adam_update(fac.bias.data(), lg.bias.data(), la.bias, fac.bias.size(), lr,
                                corr1, corr2, hp);
        }
    }
}

// ---------------------------------------------------------------------------
// Constraint projection

enum class ProjectionMode { ClampOnly, NormThenClamp };

// ClampOnly clips entries to [-1, 1] and runs after every step.
// NormThenClamp first rescales the whole matrix toward ||Z||_F^2 = n*r
// (all entries at magnitude 1) and then clamps; it runs once per epoch.
// A zero matrix passes through NormThenClamp unchanged (logged).
template <typename T>
Matrix<T> project_z(const Matrix<T>& z, ProjectionMode mode) {
    Matrix<T> out = z;
    if (mode == ProjectionMode::NormThenClamp) {
        const double norm = frobenius_norm(z);
        if (norm == 0.0) {
            std::fprintf(stderr, "binfac: NormThenClamp on a zero matrix, left unchanged\n");
            return out;
        }
        const double scale = std::sqrt(static_cast<double>(z.rows() * z.cols())) / norm;
        for (T& v : out.values()) v = static_cast<T>(static_cast<double>(v) * scale);
    }
    for (T& v : out.values()) {
        if (v > T(1)) v = T(1);
        if (v < T(-1)) v = T(-1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schedules and configuration

struct TrainConfig {
    std::size_t epochs = 300;
    double lambda0 = 1.0;
    std::optional<std::size_t> t0; // ramp start; default epochs/10
    std::optional<std::size_t> t1; // ramp length; default max(1, epochs/2)
    double lr0 = 1e-3;
    AdamParams adam;
    std::size_t batch_size = 100;
    std::uint64_t seed = 1;
    // Per-weight-matrix scale on the L1 penalty. Empty selects the
    // defaults: {1e-5, 2.5e-5, 1.5e-4} for three-matrix networks, all
    // ones otherwise.
    std::vector<double> layer_reg;

    std::size_t ramp_start() const { return t0 ? *t0 : epochs / 10; }
    std::size_t ramp_length() const { return t1 ? *t1 : std::max<std::size_t>(1, epochs / 2); }

    void validate() const {
        if (epochs < 4) throw ConfigError("TrainConfig: epochs must be >= 4");
        if (batch_size == 0) throw ConfigError("TrainConfig: batch_size must be >= 1");
        if (ramp_length() == 0) throw ConfigError("TrainConfig: t1 must be >= 1");
        if (lr0 <= 0.0) throw ConfigError("TrainConfig: lr0 must be positive");
    }

    std::vector<double> resolved_layer_reg(std::size_t num_weights) const {
        if (!layer_reg.empty()) {
            if (layer_reg.size() != num_weights)
                throw ConfigError("TrainConfig: layer_reg length does not match weight matrices");
            return layer_reg;
        }
        if (num_weights == 3) return {1e-5, 2.5e-5, 1.5e-4};
        return std::vector<double>(num_weights, 1.0);
    }
};

// lambda(t) = lambda0 * g((t - T0)/T1) with g the linear ramp clamped to
// [0, 1].
inline double lambda_schedule(std::size_t t, const TrainConfig& cfg) {
    const double u = (static_cast<double>(t) - static_cast<double>(cfg.ramp_start())) /
                     static_cast<double>(cfg.ramp_length());
    return cfg.lambda0 * std::clamp(u, 0.0, 1.0);
}

// Step decay: x0.1 from epoch ceil(T/2) and again from epoch ceil(3T/4).
inline double lr_schedule(std::size_t t, const TrainConfig& cfg) {
    const std::size_t half = (cfg.epochs + 1) / 2;
    const std::size_t three_quarters = (3 * cfg.epochs + 3) / 4;
    double lr = cfg.lr0;
    if (t >= half) lr *= 0.1;
    if (t >= three_quarters) lr *= 0.1;
    return lr;
}

// The relaxed phase covers epochs with t <= 3T/4; the transition fires
// at the first epoch with t > 3T/4 (exact integer comparison).
constexpr bool past_transition(std::size_t t, std::size_t total_epochs) {
    return 4 * t > 3 * total_epochs;
}

// ---------------------------------------------------------------------------
// Phase transition

// Snaps every relaxed Z entry to its sign (ties at zero go to +1) and
// remaps via (z+1)/2 into {0, 1}; afterwards Z is frozen and only the
// real parameters keep training.
template <typename T>
void binarize_phase_transition(Network<T>& net) {
    if (net.phase != TrainPhase::Relaxed)
        throw Error("binarize_phase_transition: phase transition already happened");
    for (LayerState<T>& layer : net.layers) {
        if (auto* fac = std::get_if<FactorizedLayer<T>>(&layer)) {
            for (T& v : fac->z.values()) v = v >= T(0) ? T(1) : T(0);
        }
    }
    net.phase = TrainPhase::FrozenBinary;
}

// SHA-256 over the packed {0,1} bit patterns of every factorized layer
// (with dimensions), defined once Z is binary.
template <typename T>
std::string z_pattern_hash(const Network<T>& net) {
    std::vector<std::uint8_t> bytes;
    for (const LayerState<T>& layer : net.layers) {
        const auto* fac = std::get_if<FactorizedLayer<T>>(&layer);
        if (!fac) continue;
        const SignMatrix packed = SignMatrix::pack(fac->z, SignConvention::ZeroOne);
        const std::uint64_t dims[2] = {fac->z.rows(), fac->z.cols()};
        for (const std::uint64_t d : dims)
            for (int byte = 0; byte < 8; ++byte)
                bytes.push_back(static_cast<std::uint8_t>(d >> (8 * byte)));
        for (const std::uint64_t w : packed.words())
            for (int byte = 0; byte < 8; ++byte)
                bytes.push_back(static_cast<std::uint8_t>(w >> (8 * byte)));
    }
    return sha256_hex(bytes);
}

// ---------------------------------------------------------------------------
// Training loop

struct EpochStats {
    std::size_t epoch;
    double lambda;
    double lr;
    double train_loss; // sample-weighted mean over the epoch's batches
    double val_error; // NaN when no validation set was given
    double mean_distance_to_binary;
};

struct History {
    std::vector<EpochStats> epochs;
    std::size_t transition_epoch = 0; // 0 = no transition happened
    std::string transition_z_hash;
    std::string final_z_hash;
};

// Mean over all factorized entries of the distance to the nearest
// admissible binary value: 1 - |z| while relaxed, min(z, 1-z) once
// frozen (exactly zero then). Returns 0 for purely dense networks.
template <typename T>
double mean_distance_to_binary(const Network<T>& net) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const LayerState<T>& layer : net.layers) {
        const auto* fac = std::get_if<FactorizedLayer<T>>(&layer);
        if (!fac) continue;
        for (const T v : fac->z.values()) {
            const double x = static_cast<double>(v);
            if (net.phase == TrainPhase::Relaxed)
                sum += std::max(0.0, 1.0 - std::abs(x));
            else
                sum += std::min(std::abs(x), std::abs(1.0 - x));
        }
        count += fac->z.size();
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

template <typename T>
double evaluate(const Network<T>& net, const Dataset& ds, std::size_t eval_batch = 512);

// The two-phase schedule: while t <= 3T/4 all parameters train, Z is
// clamped to the box after every step and norm-projected once per
// epoch; at the first epoch with t > 3T/4 Z snaps to {0,1} and freezes,
// after which only the real parameters update. Mini-batch order is
// reshuffled per epoch from derive_seed(seed, epoch). Single-threaded
// and bitwise deterministic for a fixed (seed, config, data) triple.
template <typename T>
std::pair<Network<T>, History> train(const NetworkSpec& spec, const TrainConfig& cfg,
                                     const Dataset& train_set, const Dataset& val_set) {
    spec.validate();
    cfg.validate();
    train_set.validate();
    val_set.validate();
    if (train_set.size() == 0) throw ConfigError("train: empty training set");
    if (train_set.dim() != spec.layer_dims.front())
        throw DimensionError("train: dataset width does not match input dimension");

    const std::vector<double> reg = cfg.resolved_layer_reg(spec.num_weight_matrices());
    Rng init_rng(cfg.seed);
    Network<T> net = init_network<T>(spec, init_rng);
    AdamState<T> adam = init_adam(net);

    History history;
    Matrix<T> batch_images;
    std::vector<std::uint8_t> batch_labels;

    for (std::size_t t = 1; t <= cfg.epochs; ++t) {
        const double lambda = lambda_schedule(t, cfg);
        const double lr = lr_schedule(t, cfg);

        if (past_transition(t, cfg.epochs) && net.phase == TrainPhase::Relaxed) {
            binarize_phase_transition(net);
            history.transition_epoch = t;
            history.transition_z_hash = z_pattern_hash(net);
        }
        const bool relaxed = net.phase == TrainPhase::Relaxed;

        double loss_sum = 0.0;
        const auto batches = batch_indices(train_set.size(), cfg.batch_size,
                                           derive_seed(cfg.seed, t));
        for (const auto& idx : batches) {
            gather_batch(train_set, idx, batch_images, batch_labels);
            auto [loss, grads] = loss_and_gradients(net, batch_images, batch_labels, lambda, reg);
            adam_step(net, grads, adam, lr, cfg.adam);
            if (relaxed) {
                for (LayerState<T>& layer : net.layers) {
                    if (auto* fac = std::get_if<FactorizedLayer<T>>(&layer)) {
                        fac->z = project_z(fac->z, ProjectionMode::ClampOnly);
                        assert(max_abs(fac->z) <= 1.0);
                    }
                }
            }
            loss_sum += loss * static_cast<double>(idx.size());
        }

        if (relaxed) {
            for (LayerState<T>& layer : net.layers) {
                if (auto* fac = std::get_if<FactorizedLayer<T>>(&layer))
                    fac->z = project_z(fac->z, ProjectionMode::NormThenClamp);
            }
        }

        EpochStats stats;
        stats.epoch = t;
        stats.lambda = lambda;
        stats.lr = lr;
        stats.train_loss = loss_sum / static_cast<double>(train_set.size());
        stats.val_error = val_set.size() > 0 ? evaluate(net, val_set)
                                             : std::numeric_limits<double>::quiet_NaN();
        stats.mean_distance_to_binary = mean_distance_to_binary(net);
        history.epochs.push_back(stats);
    }

    if (net.phase == TrainPhase::FrozenBinary) history.final_z_hash = z_pattern_hash(net);
    return {std::move(net), std::move(history)};
}

// Fraction of argmax-misclassified samples; argmax ties resolve to the
// lowest class index.
template <typename T>
double evaluate(const Network<T>& net, const Dataset& ds, std::size_t eval_batch) {
    if (ds.size() == 0) throw Error("evaluate: empty test set");
    ds.validate();

    std::size_t wrong = 0;
    Matrix<T> images;
    std::vector<std::uint8_t> labels;
    std::vector<std::uint32_t> idx;
    for (std::size_t start = 0; start < ds.size(); start += eval_batch) {
        const std::size_t end = std::min(ds.size(), start + eval_batch);
        idx.resize(end - start);
        for (std::size_t i = start; i < end; ++i) idx[i - start] = static_cast<std::uint32_t>(i);
        gather_batch(ds, idx, images, labels);
        const Matrix<T> logits = forward(net, images);
        for (std::size_t i = 0; i < logits.rows(); ++i) {
            const T* row = logits.row(i);
            std::size_t best = 0;
            for (std::size_t c = 1; c < logits.cols(); ++c)
                if (row[c] > row[best]) best = c;
            if (best != labels[i]) ++wrong;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

} // namespace binfac
