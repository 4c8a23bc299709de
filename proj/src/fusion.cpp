#include "specfuse/fusion.hpp"

#include <cmath>
#include <limits>

#include "specfuse/error.hpp"
#include "specfuse/rng.hpp"

namespace specfuse {

namespace {

void check_pair_shapes(const Matrix& f_sf, const Matrix& f_ssl, std::size_t dim,
                       const char* op) {
    if (!f_sf.same_shape(f_ssl))
        raise(ErrorKind::Shape, std::string(op) + ": stream shapes differ (" +
                                    std::to_string(f_sf.rows()) + "x" + std::to_string(f_sf.cols()) +
                                    " vs " + std::to_string(f_ssl.rows()) + "x" +
                                    std::to_string(f_ssl.cols()) + ")");
    if (f_sf.cols() != dim)
        raise(ErrorKind::Shape, std::string(op) + ": stream dim " + std::to_string(f_sf.cols()) +
                                    " does not match parameter dim " + std::to_string(dim));
}

void add_row_bias(Matrix& m, const Matrix& bias) {
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) += bias(0, c);
}

// out[t] = sum_s shift(x, s - h) * kernel[s] (+ bias), zero-padded "same"
// convolution along time, stride 1.
Matrix conv1d_same(const Matrix& x, const std::vector<Matrix>& kernel, const Matrix& bias,
                   bool use_bias) {
    const std::size_t k = kernel.size();
    const long half = static_cast<long>(k) / 2;
    const std::size_t t_len = x.rows();
    const std::size_t d = x.cols();
    Matrix out(t_len, kernel.empty() ? d : kernel[0].cols());
    for (std::size_t s = 0; s < k; ++s) {
        const long delta = static_cast<long>(s) - half;
        const Matrix& tap = kernel[s];
        for (std::size_t t = 0; t < t_len; ++t) {
            const long src = static_cast<long>(t) + delta;
            if (src < 0 || src >= static_cast<long>(t_len)) continue;
            for (std::size_t c = 0; c < d; ++c) {
                const double xv = x(static_cast<std::size_t>(src), c);
                if (xv == 0.0) continue;
                for (std::size_t o = 0; o < tap.cols(); ++o) out(t, o) += xv * tap(c, o);
            }
        }
    }
    if (use_bias) add_row_bias(out, bias);
    return out;
}

}  // namespace

const char* to_string(FusionVariant v) {
    switch (v) {
        case FusionVariant::Linear: return "linear";
        case FusionVariant::Conv: return "conv";
        case FusionVariant::CoAttention: return "coattention";
        case FusionVariant::MoE: return "moe";
    }
    return "?";
}

const char* to_string(GateFunction g) {
    return g == GateFunction::SoftMax ? "softmax" : "logsoftmax";
}

FusionVariant fusion_variant_from_string(const std::string& s) {
    if (s == "linear") return FusionVariant::Linear;
    if (s == "conv") return FusionVariant::Conv;
    if (s == "coattention") return FusionVariant::CoAttention;
    if (s == "moe") return FusionVariant::MoE;
    raise(ErrorKind::InvalidArgument, "unknown fusion variant '" + s + "'");
}

GateFunction gate_function_from_string(const std::string& s) {
    if (s == "softmax") return GateFunction::SoftMax;
    if (s == "logsoftmax") return GateFunction::LogSoftMax;
    raise(ErrorKind::InvalidArgument, "unknown gate function '" + s + "'");
}

void softmax_rows_inplace(Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m.cols(); ++c) mx = std::max(mx, m(r, c));
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(r, c) = std::exp(m(r, c) - mx);
            sum += m(r, c);
        }
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) /= sum;
    }
}

void log_softmax_rows_inplace(Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m.cols(); ++c) mx = std::max(mx, m(r, c));
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) sum += std::exp(m(r, c) - mx);
        const double lse = mx + std::log(sum);
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) -= lse;
    }
}

Matrix softmax_backward_rows(const Matrix& probs, const Matrix& upstream) {
    Matrix out(probs.rows(), probs.cols());
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < probs.cols(); ++c) dot += upstream(r, c) * probs(r, c);
        for (std::size_t c = 0; c < probs.cols(); ++c)
            out(r, c) = probs(r, c) * (upstream(r, c) - dot);
    }
    return out;
}

Matrix log_softmax_backward_rows(const Matrix& logprobs, const Matrix& upstream) {
    Matrix out(logprobs.rows(), logprobs.cols());
    for (std::size_t r = 0; r < logprobs.rows(); ++r) {
        double gsum = 0.0;
        for (std::size_t c = 0; c < logprobs.cols(); ++c) gsum += upstream(r, c);
        for (std::size_t c = 0; c < logprobs.cols(); ++c)
            out(r, c) = upstream(r, c) - std::exp(logprobs(r, c)) * gsum;
    }
    return out;
}

LinearFusionParams make_linear_params(std::size_t dim, std::uint64_t seed, bool use_bias) {
    Rng rng(seed);
    LinearFusionParams p;
    p.w_cat = random_fan_in(2 * dim, dim, 2 * dim, rng);
    p.b = Matrix(1, dim);
    p.use_bias = use_bias;
    return p;
}

ConvFusionParams make_conv_params(std::size_t dim, std::size_t kernel_size, std::uint64_t seed,
                                  bool use_bias) {
    if (kernel_size % 2 == 0)
        raise(ErrorKind::Config, "conv fusion: kernel size must be odd for symmetric padding");
    Rng rng(seed);
    ConvFusionParams p;
    const std::size_t fan_in = kernel_size * dim;
    for (std::size_t s = 0; s < kernel_size; ++s)
        p.kernel_sf.push_back(random_fan_in(dim, dim, fan_in, rng));
    for (std::size_t s = 0; s < kernel_size; ++s)
        p.kernel_ssl.push_back(random_fan_in(dim, dim, fan_in, rng));
    p.b_sf = Matrix(1, dim);
    p.b_ssl = Matrix(1, dim);
    p.w_cat = random_fan_in(2 * dim, dim, 2 * dim, rng);
    p.b = Matrix(1, dim);
    p.use_bias = use_bias;
    return p;
}

CoAttentionParams make_coattention_params(std::size_t dim, std::uint64_t seed, bool use_bias) {
    Rng rng(seed);
    CoAttentionParams p;
    p.w_sf_q = random_fan_in(dim, dim, dim, rng);
    p.w_sf_k = random_fan_in(dim, dim, dim, rng);
    p.w_sf_v = random_fan_in(dim, dim, dim, rng);
    p.w_ssl_q = random_fan_in(dim, dim, dim, rng);
    p.w_ssl_k = random_fan_in(dim, dim, dim, rng);
    p.w_ssl_v = random_fan_in(dim, dim, dim, rng);
    p.w_out = random_fan_in(2 * dim, dim, 2 * dim, rng);
    p.b_out = Matrix(1, dim);
    p.use_bias = use_bias;
    return p;
}

MoEParams make_moe_params(std::size_t dim, GateFunction theta, std::uint64_t seed, bool use_bias) {
    Rng rng(seed);
    MoEParams p;
    p.w_moe = random_fan_in(dim, 2, dim, rng);
    p.b_moe = Matrix(1, 2);
    p.theta = theta;
    p.use_bias = use_bias;
    return p;
}

FusionParams make_fusion_params(FusionVariant v, std::size_t dim, std::uint64_t seed,
                                GateFunction theta, std::size_t kernel_size, bool use_bias) {
    switch (v) {
        case FusionVariant::Linear: return make_linear_params(dim, seed, use_bias);
        case FusionVariant::Conv: return make_conv_params(dim, kernel_size, seed, use_bias);
        case FusionVariant::CoAttention: return make_coattention_params(dim, seed, use_bias);
        case FusionVariant::MoE: return make_moe_params(dim, theta, seed, use_bias);
    }
    raise(ErrorKind::Config, "make_fusion_params: unknown variant");
}

Matrix fuse_linear(const Matrix& f_sf, const Matrix& f_ssl, const LinearFusionParams& p) {
    check_pair_shapes(f_sf, f_ssl, p.dim(), "fuse_linear");
    Matrix out = matmul(concat_cols(f_sf, f_ssl), p.w_cat);
    if (p.use_bias) add_row_bias(out, p.b);
    return out;
}

Matrix fuse_conv(const Matrix& f_sf, const Matrix& f_ssl, const ConvFusionParams& p) {
    check_pair_shapes(f_sf, f_ssl, p.dim(), "fuse_conv");
    if (p.kernel_size() == 0 || p.kernel_size() % 2 == 0)
        raise(ErrorKind::Config, "fuse_conv: kernel size must be odd and positive");
    const Matrix conv_sf = conv1d_same(f_sf, p.kernel_sf, p.b_sf, p.use_bias);
    const Matrix conv_ssl = conv1d_same(f_ssl, p.kernel_ssl, p.b_ssl, p.use_bias);
    Matrix out = matmul(concat_cols(conv_sf, conv_ssl), p.w_cat);
    if (p.use_bias) add_row_bias(out, p.b);
    return out;
}

CoAttentionCache coattention_forward(const Matrix& f_sf, const Matrix& f_ssl,
                                     const CoAttentionParams& p) {
    check_pair_shapes(f_sf, f_ssl, p.dim(), "fuse_coattention");
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.dim()));

    CoAttentionCache c;
    c.q_sf = matmul(f_sf, p.w_sf_q);
    c.k_sf = matmul(f_sf, p.w_sf_k);
    c.v_sf = matmul(f_sf, p.w_sf_v);
    c.q_ssl = matmul(f_ssl, p.w_ssl_q);
    c.k_ssl = matmul(f_ssl, p.w_ssl_k);
    c.v_ssl = matmul(f_ssl, p.w_ssl_v);

    c.attn_sf = matmul(c.q_sf, transpose(c.k_ssl));
    c.attn_sf *= scale;
    softmax_rows_inplace(c.attn_sf);
    c.h_sf = matmul(c.attn_sf, c.v_ssl);
    c.h_sf += f_sf;

    c.attn_ssl = matmul(c.q_ssl, transpose(c.k_sf));
    c.attn_ssl *= scale;
    softmax_rows_inplace(c.attn_ssl);
    c.h_ssl = matmul(c.attn_ssl, c.v_sf);
    c.h_ssl += f_ssl;

    c.out = matmul(concat_cols(c.h_sf, c.h_ssl), p.w_out);
    if (p.use_bias) add_row_bias(c.out, p.b_out);
    return c;
}

Matrix fuse_coattention(const Matrix& f_sf, const Matrix& f_ssl, const CoAttentionParams& p) {
    return coattention_forward(f_sf, f_ssl, p).out;
}

GateWeights gate_weights(const Matrix& f_sf, const MoEParams& p) {
    if (f_sf.cols() != p.dim())
        raise(ErrorKind::Shape, "gate_weights: stream dim " + std::to_string(f_sf.cols()) +
                                    " does not match gate dim " + std::to_string(p.dim()));
    if (!f_sf.is_finite())
        raise(ErrorKind::InvalidData, "gate_weights: non-finite input features");

    GateWeights g;
    g.w = matmul(f_sf, p.w_moe);
    if (p.use_bias) add_row_bias(g.w, p.b_moe);
    if (p.theta == GateFunction::SoftMax) {
        softmax_rows_inplace(g.w);
        g.log_domain = false;
    } else {
        log_softmax_rows_inplace(g.w);
        g.log_domain = true;
    }
    g.normalized = false;
    return g;
}

std::pair<Matrix, GateWeights> fuse_moe(const Matrix& f_sf, const Matrix& f_ssl,
                                        const MoEParams& p) {
    check_pair_shapes(f_sf, f_ssl, p.dim(), "fuse_moe");
    GateWeights g = gate_weights(f_sf, p);
    Matrix out(f_sf.rows(), f_sf.cols());
    for (std::size_t t = 0; t < out.rows(); ++t)
        for (std::size_t c = 0; c < out.cols(); ++c)
            out(t, c) = g.w(t, 0) * f_sf(t, c) + g.w(t, 1) * f_ssl(t, c);
    return {std::move(out), std::move(g)};
}

Matrix fuse(FusionVariant v, const Matrix& f_sf, const Matrix& f_ssl, const FusionParams& p) {
    switch (v) {
        case FusionVariant::Linear:
            if (const auto* lp = std::get_if<LinearFusionParams>(&p))
                return fuse_linear(f_sf, f_ssl, *lp);
            break;
        case FusionVariant::Conv:
            if (const auto* cp = std::get_if<ConvFusionParams>(&p))
                return fuse_conv(f_sf, f_ssl, *cp);
            break;
        case FusionVariant::CoAttention:
            if (const auto* ap = std::get_if<CoAttentionParams>(&p))
                return fuse_coattention(f_sf, f_ssl, *ap);
            break;
        case FusionVariant::MoE:
            if (const auto* mp = std::get_if<MoEParams>(&p))
                return fuse_moe(f_sf, f_ssl, *mp).first;
            break;
    }
    raise(ErrorKind::Config, std::string("fuse: parameters do not match variant '") +
                                 to_string(v) + "'");
}

FeatureMatrix fuse_features(FusionVariant v, const FeatureMatrix& f_sf, const FeatureMatrix& f_ssl,
                            const FusionParams& p) {
    if (std::abs(f_sf.frame_shift_ms - f_ssl.frame_shift_ms) > 1e-6)
        raise(ErrorKind::Alignment, "fuse_features: streams are on different frame clocks");
    FeatureMatrix out;
    out.frame_shift_ms = f_sf.frame_shift_ms;
    out.source = FeatureSource::FUSED;
    out.data = fuse(v, f_sf.data, f_ssl.data, p);
    return out;
}

}  // namespace specfuse
