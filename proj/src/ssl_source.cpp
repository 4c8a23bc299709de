#include "specfuse/ssl_source.hpp"

#include "specfuse/error.hpp"
#include "specfuse/feat_io.hpp"
#include "specfuse/rng.hpp"

namespace specfuse {

void SslSourceConfig::validate() const {
    if (dim < 1) raise(ErrorKind::Config, "ssl source: dim must be >= 1");
    if (!(frame_shift_ms > 0.0)) raise(ErrorKind::Config, "ssl source: frame shift must be positive");
    if (kind == Kind::File && path.empty())
        raise(ErrorKind::Config, "ssl source: file kind needs a path");
}

FeatureMatrix synth_features(const SslSourceConfig& cfg, std::size_t n_frames,
                             const std::optional<Matrix>& injected_signal) {
    cfg.validate();
    const std::size_t dim = static_cast<std::size_t>(cfg.dim);

    FeatureMatrix fm;
    fm.frame_shift_ms = cfg.frame_shift_ms;
    fm.source = FeatureSource::SSL;

    Rng rng(cfg.seed);
    fm.data = random_gaussian(n_frames, dim, rng);

    if (injected_signal) {
        const Matrix& sig = *injected_signal;
        if (sig.cols() > dim)
            raise(ErrorKind::Shape, "synth_features: injected signal has " +
                                        std::to_string(sig.cols()) + " columns, stream dim is " +
                                        std::to_string(dim));
        if (sig.rows() != n_frames)
            raise(ErrorKind::Shape, "synth_features: injected signal has " +
                                        std::to_string(sig.rows()) + " frames, expected " +
                                        std::to_string(n_frames));
        for (std::size_t t = 0; t < n_frames; ++t)
            for (std::size_t c = 0; c < sig.cols(); ++c) fm.data(t, c) = sig(t, c);
    }
    return fm;
}

FeatureMatrix fetch_features(const SslSourceConfig& cfg, std::size_t n_frames) {
    cfg.validate();
    if (cfg.kind == SslSourceConfig::Kind::File) return load_features(cfg.path);
    return synth_features(cfg, n_frames);
}

}  // namespace specfuse
