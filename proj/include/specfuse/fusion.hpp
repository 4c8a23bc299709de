#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "specfuse/types.hpp"

namespace specfuse {

enum class FusionVariant { Linear, Conv, CoAttention, MoE };

enum class GateFunction { SoftMax, LogSoftMax };

const char* to_string(FusionVariant v);
const char* to_string(GateFunction g);
FusionVariant fusion_variant_from_string(const std::string& s);
GateFunction gate_function_from_string(const std::string& s);

// Row-wise softmax with max subtraction; stable for logits up to at least
// 1e4 in magnitude. Each output row sums to 1.
void softmax_rows_inplace(Matrix& m);

// Row-wise log-softmax: x - max - log(sum exp(x - max)). Entries are <= 0
// and each row's exponentials sum to 1.
void log_softmax_rows_inplace(Matrix& m);

// Backward of row-wise softmax. With p a softmax row and g the upstream row:
//   dz_i = p_i * (g_i - sum_j g_j * p_j)
Matrix softmax_backward_rows(const Matrix& probs, const Matrix& upstream);

// Backward of row-wise log-softmax. With l the log-softmax row (p = exp(l)):
//   dz_i = g_i - p_i * sum_j g_j
Matrix log_softmax_backward_rows(const Matrix& logprobs, const Matrix& upstream);

// ---------------------------------------------------------------------------
// Per-variant parameters. Biases are an extension over the pure matrix-product
// formulation; use_bias=false recovers the exact formulation (oracle tests
// run that mode), and the seeded factories below initialize weights with
// fan-in uniform scaling and biases at zero.
// ---------------------------------------------------------------------------

struct LinearFusionParams {
    Matrix w_cat;  // (2D) x D
    Matrix b;      // 1 x D
    bool use_bias = true;

    std::size_t dim() const { return w_cat.cols(); }
};

struct ConvFusionParams {
    // One depth-full 1-D kernel per stream: kernel[s] is the D x D tap matrix
    // at time offset s - kernel_size/2. Stride 1, zero "same" padding.
    std::vector<Matrix> kernel_sf;
    std::vector<Matrix> kernel_ssl;
    Matrix b_sf;   // 1 x D
    Matrix b_ssl;  // 1 x D
    Matrix w_cat;  // (2D) x D
    Matrix b;      // 1 x D
    bool use_bias = true;

    std::size_t dim() const { return w_cat.cols(); }
    std::size_t kernel_size() const { return kernel_sf.size(); }
};

struct CoAttentionParams {
    Matrix w_sf_q, w_sf_k, w_sf_v;     // D x D
    Matrix w_ssl_q, w_ssl_k, w_ssl_v;  // D x D
    Matrix w_out;                      // (2D) x D
    Matrix b_out;                      // 1 x D
    bool use_bias = true;

    std::size_t dim() const { return w_sf_q.rows(); }
};

struct MoEParams {
    Matrix w_moe;  // D x 2, column 0 gates the spectral stream
    Matrix b_moe;  // 1 x 2; zero (and frozen) in paper-exact mode
    GateFunction theta = GateFunction::LogSoftMax;
    bool use_bias = true;

    std::size_t dim() const { return w_moe.rows(); }
};

using FusionParams = std::variant<LinearFusionParams, ConvFusionParams, CoAttentionParams, MoEParams>;

LinearFusionParams make_linear_params(std::size_t dim, std::uint64_t seed, bool use_bias = true);
ConvFusionParams make_conv_params(std::size_t dim, std::size_t kernel_size, std::uint64_t seed,
                                  bool use_bias = true);
CoAttentionParams make_coattention_params(std::size_t dim, std::uint64_t seed, bool use_bias = true);
MoEParams make_moe_params(std::size_t dim, GateFunction theta, std::uint64_t seed,
                          bool use_bias = true);
FusionParams make_fusion_params(FusionVariant v, std::size_t dim, std::uint64_t seed,
                                GateFunction theta = GateFunction::LogSoftMax,
                                std::size_t kernel_size = 5, bool use_bias = true);

// Per-frame gate outputs w = theta(f_sf * W + b), T x 2.
struct GateWeights {
    Matrix w;                 // T x 2: column 0 = spectral weight, column 1 = ssl weight
    bool normalized = false;  // rows sum to 1 with non-negative entries
    bool log_domain = false;  // produced by a log-softmax gate
};

// ---------------------------------------------------------------------------
// Forward operators. All take two aligned T x D streams and return T x D.
// ---------------------------------------------------------------------------

// Row t of the output is [f_sf[t] || f_ssl[t]] * W_cat (+ b).
Matrix fuse_linear(const Matrix& f_sf, const Matrix& f_ssl, const LinearFusionParams& p);

// Each stream is convolved along time, then concatenated and projected as in
// the linear operator.
Matrix fuse_conv(const Matrix& f_sf, const Matrix& f_ssl, const ConvFusionParams& p);

// Two parallel one-head scaled dot-product cross-attention blocks with
// residual connections:
//   Q_i = f_i W_i^Q,  K_i = f_i W_i^K,  V_i = f_i W_i^V
//   h_sf  = softmax(Q_sf K_ssl^T / sqrt(D)) V_ssl + f_sf
//   h_ssl = softmax(Q_ssl K_sf^T / sqrt(D)) V_sf + f_ssl
//   out   = [h_sf || h_ssl] W_out (+ b_out)
// Softmax runs row-wise over the key positions.
Matrix fuse_coattention(const Matrix& f_sf, const Matrix& f_ssl, const CoAttentionParams& p);

// Forward cache for the co-attention operator; the backward pass and the
// residual-identity checks need the intermediates.
struct CoAttentionCache {
    Matrix q_sf, k_sf, v_sf;
    Matrix q_ssl, k_ssl, v_ssl;
    Matrix attn_sf;   // T x T rows: spectral queries over ssl keys
    Matrix attn_ssl;  // T x T rows: ssl queries over spectral keys
    Matrix h_sf, h_ssl;
    Matrix out;
};
CoAttentionCache coattention_forward(const Matrix& f_sf, const Matrix& f_ssl,
                                     const CoAttentionParams& p);

// w = theta(f_sf * W_moe (+ b_moe)) row-wise; not normalized.
GateWeights gate_weights(const Matrix& f_sf, const MoEParams& p);

// Per-frame weighted sum using the raw gate outputs:
//   out[t] = w[t][0] * f_sf[t] + w[t][1] * f_ssl[t]
// With a log-softmax gate the raw weights are the (negative) log
// probabilities, applied literally.
std::pair<Matrix, GateWeights> fuse_moe(const Matrix& f_sf, const Matrix& f_ssl,
                                        const MoEParams& p);

// Dispatch on the variant tag; the params alternative must match the tag,
// otherwise Error(Config).
Matrix fuse(FusionVariant v, const Matrix& f_sf, const Matrix& f_ssl, const FusionParams& p);

// Fuse two aligned feature streams, carrying the frame clock through.
FeatureMatrix fuse_features(FusionVariant v, const FeatureMatrix& f_sf, const FeatureMatrix& f_ssl,
                            const FusionParams& p);

}  // namespace specfuse
