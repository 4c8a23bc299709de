#include "specfuse/align.hpp"

#include <cmath>
#include <cstdio>

#include "specfuse/error.hpp"
#include "specfuse/rng.hpp"

namespace specfuse {

AlignParams make_align_params(std::size_t sf_dim, std::size_t ssl_dim, std::size_t out_dim,
                              std::uint64_t seed) {
    if (sf_dim == 0 || ssl_dim == 0 || out_dim == 0)
        raise(ErrorKind::Config, "align params: dimensions must be positive");
    if (ssl_dim <= sf_dim)
        std::fprintf(stderr,
                     "warning: ssl dim (%zu) <= spectral dim (%zu); projection direction "
                     "assumes a wider ssl stream\n",
                     ssl_dim, sf_dim);
    Rng rng(seed);
    AlignParams p;
    p.w_proj_ssl = random_fan_in(ssl_dim, out_dim, ssl_dim, rng);
    p.w_down_sf = random_fan_in(2 * sf_dim, out_dim, 2 * sf_dim, rng);
    return p;
}

FeatureMatrix project_ssl(const FeatureMatrix& f_ssl, const AlignParams& p) {
    if (f_ssl.dim() != p.ssl_dim())
        raise(ErrorKind::Shape, "project_ssl: stream dim " + std::to_string(f_ssl.dim()) +
                                    " does not match projection rows " +
                                    std::to_string(p.ssl_dim()));
    FeatureMatrix out;
    out.frame_shift_ms = f_ssl.frame_shift_ms;
    out.source = f_ssl.source;
    out.data = matmul(f_ssl.data, p.w_proj_ssl);
    return out;
}

FeatureMatrix downsample_sf(const FeatureMatrix& f_sf, const AlignParams& p,
                            std::size_t target_frames) {
    if (f_sf.dim() != p.sf_dim())
        raise(ErrorKind::Shape, "downsample_sf: stream dim " + std::to_string(f_sf.dim()) +
                                    " does not match projection rows / 2 = " +
                                    std::to_string(p.sf_dim()));
    const std::size_t pairs = f_sf.frames() / 2;
    const std::size_t d_sf = f_sf.dim();

    const std::size_t diff = pairs > target_frames ? pairs - target_frames : target_frames - pairs;
    if (diff > kFrameTolerance)
        raise(ErrorKind::Alignment,
              "downsample_sf: downsampled frame count " + std::to_string(pairs) +
                  " vs target " + std::to_string(target_frames) + " differs by " +
                  std::to_string(diff) + " frames (clock mismatch, tolerance " +
                  std::to_string(kFrameTolerance) + ")");

    Matrix paired(pairs, 2 * d_sf);
    for (std::size_t t = 0; t < pairs; ++t) {
        for (std::size_t c = 0; c < d_sf; ++c) {
            paired(t, c) = f_sf.data(2 * t, c);
            paired(t, d_sf + c) = f_sf.data(2 * t + 1, c);
        }
    }

    FeatureMatrix out;
    out.frame_shift_ms = 2.0 * f_sf.frame_shift_ms;
    out.source = f_sf.source;
    out.data = matmul(paired, p.w_down_sf);
    if (out.data.rows() > target_frames) out.data = truncate_rows(out.data, target_frames);
    return out;
}

std::pair<FeatureMatrix, FeatureMatrix> align_pair(const FeatureMatrix& f_sf,
                                                   const FeatureMatrix& f_ssl,
                                                   const AlignParams& p) {
    if (std::abs(2.0 * f_sf.frame_shift_ms - f_ssl.frame_shift_ms) > 1e-6)
        raise(ErrorKind::Alignment,
              "align_pair: spectral frame shift must be half the ssl frame shift (got " +
                  std::to_string(f_sf.frame_shift_ms) + " ms vs " +
                  std::to_string(f_ssl.frame_shift_ms) + " ms)");

    const std::size_t pairs = f_sf.frames() / 2;
    const std::size_t t_ssl = f_ssl.frames();
    const std::size_t diff = pairs > t_ssl ? pairs - t_ssl : t_ssl - pairs;
    if (diff > kFrameTolerance)
        raise(ErrorKind::Alignment,
              "align_pair: downsampled spectral frames " + std::to_string(pairs) + " vs ssl frames " +
                  std::to_string(t_ssl) + " differ by " + std::to_string(diff) +
                  " (clock mismatch, tolerance " + std::to_string(kFrameTolerance) + ")");
    const std::size_t common = std::min(pairs, t_ssl);

    FeatureMatrix sf_out = downsample_sf(f_sf, p, common);
    FeatureMatrix ssl_out = project_ssl(f_ssl, p);
    if (ssl_out.data.rows() > common) ssl_out.data = truncate_rows(ssl_out.data, common);
    return {std::move(sf_out), std::move(ssl_out)};
}

}  // namespace specfuse
