#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specfuse/matrix.hpp"

namespace specfuse {

// Mono audio at a known sample rate. Samples are dimensionless amplitudes
// (PCM input is scaled to [-1, 1) by the WAV reader).
struct Waveform {
    std::vector<double> samples;
    int sample_rate = 16000;
};

enum class FeatureSource : std::uint8_t {
    SF = 0,     // spectral front-end (filterbank energies)
    SSL = 1,    // self-supervised feature stream
    FUSED = 2,  // output of a fusion operator
};

inline const char* to_string(FeatureSource s) {
    switch (s) {
        case FeatureSource::SF: return "SF";
        case FeatureSource::SSL: return "SSL";
        case FeatureSource::FUSED: return "FUSED";
    }
    return "?";
}

// A T x D feature stream plus its frame clock.
struct FeatureMatrix {
    Matrix data;
    double frame_shift_ms = 10.0;
    FeatureSource source = FeatureSource::SF;

    std::size_t frames() const { return data.rows(); }
    std::size_t dim() const { return data.cols(); }
};

}  // namespace specfuse
