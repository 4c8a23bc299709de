#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "specfuse/types.hpp"

namespace specfuse {

// Stand-in for an external self-supervised feature extractor: either a FEAT
// file produced elsewhere or a seeded synthetic stream on the 20 ms clock.
struct SslSourceConfig {
    enum class Kind { File, Synthetic };

    Kind kind = Kind::Synthetic;
    std::string path;                // Kind::File only
    int dim = 1024;                  // D_SSL; no released model pins this, the file header wins
    double frame_shift_ms = 20.0;
    std::uint64_t seed = 0;          // Kind::Synthetic only

    void validate() const;
};

// Deterministic synthetic stream: standard-normal entries drawn from the
// documented SplitMix64/Box-Muller generator, fully determined by
// (seed, dim, n_frames). If injected_signal (T x k, k <= dim) is given, its
// columns overwrite the first k feature columns; this is how toy tasks plant
// label-bearing content in one stream.
FeatureMatrix synth_features(const SslSourceConfig& cfg, std::size_t n_frames,
                             const std::optional<Matrix>& injected_signal = std::nullopt);

// Resolve the config: load the FEAT file or synthesize n_frames frames.
FeatureMatrix fetch_features(const SslSourceConfig& cfg, std::size_t n_frames = 0);

}  // namespace specfuse
