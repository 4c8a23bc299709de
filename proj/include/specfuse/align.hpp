#pragma once

#include <cstdint>
#include <utility>

#include "specfuse/types.hpp"

namespace specfuse {

// Learnable maps that bring the two streams to a common shape: the SSL
// stream is projected down to the spectral dimension (cheaper than the
// reverse since D_SSL > D_SF), and the spectral stream is downsampled by
// concatenating consecutive frame pairs and projecting, which halves the
// 10 ms clock onto the 20 ms one.
struct AlignParams {
    Matrix w_proj_ssl;  // D_SSL x D
    Matrix w_down_sf;   // (2 * D_SF) x D

    std::size_t ssl_dim() const { return w_proj_ssl.rows(); }
    std::size_t sf_dim() const { return w_down_sf.rows() / 2; }
    std::size_t out_dim() const { return w_proj_ssl.cols(); }
};

// Fan-in uniform init, seeded. Warns on stderr when ssl_dim <= sf_dim since
// projecting the smaller stream down is the unexpected direction.
AlignParams make_align_params(std::size_t sf_dim, std::size_t ssl_dim, std::size_t out_dim,
                              std::uint64_t seed);

// Frame-count reconciliation rule: the downsampled spectral frame count and
// the SSL frame count may disagree by up to this many frames (edge effects);
// the longer stream is truncated, never padded. Larger gaps indicate a clock
// mismatch and raise Error(Alignment).
inline constexpr std::size_t kFrameTolerance = 2;

// T_SSL x D_SSL -> T_SSL x D linear projection; frame shift unchanged.
FeatureMatrix project_ssl(const FeatureMatrix& f_ssl, const AlignParams& p);

// Concatenate frame pairs (2t, 2t+1) into 2*D_SF vectors and project to D.
// floor(T_SF / 2) rows before reconciliation against target_frames; an odd
// trailing frame is dropped. The frame shift doubles.
FeatureMatrix downsample_sf(const FeatureMatrix& f_sf, const AlignParams& p,
                            std::size_t target_frames);

// Both streams of one utterance to a common T x D, T = min of the two frame
// counts within kFrameTolerance.
std::pair<FeatureMatrix, FeatureMatrix> align_pair(const FeatureMatrix& f_sf,
                                                   const FeatureMatrix& f_ssl,
                                                   const AlignParams& p);

}  // namespace specfuse
