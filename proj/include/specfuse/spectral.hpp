#pragma once

#include <span>
#include <vector>

#include "specfuse/types.hpp"

namespace specfuse {

enum class WindowKind {
    Hann,         // 0.5 - 0.5*cos(2*pi*n/(L-1)), symmetric
    Rectangular,  // all ones
};

struct SpectralConfig {
    double frame_length_ms = 25.0;
    double frame_shift_ms = 10.0;
    int n_mels = 80;
    double pre_emphasis = 0.97;
    int sample_rate = 16000;
    double log_floor = 1e-10;
    WindowKind window = WindowKind::Hann;

    int frame_length_samples() const;
    int frame_shift_samples() const;
    void validate() const;  // throws Error(Config) on inconsistent settings
};

// y[0] = x[0]; y[t] = x[t] - coeff * x[t-1]. Requires 0 <= coeff < 1 and
// finite samples.
Waveform pre_emphasize(const Waveform& w, double coeff);

// Contiguous frames of frame_length samples every frame_shift samples.
// Views into the waveform buffer; the waveform must outlive them.
// floor((N - L) / H) + 1 frames for N >= L, zero frames otherwise.
std::vector<std::span<const double>> frame_signal(const Waveform& w, const SpectralConfig& cfg);

std::vector<double> make_window(WindowKind kind, std::size_t length);

// |DFT_k(window .* frame)|^2 for k = 0 .. floor(L/2). The transform is the
// exact L-point DFT for any L (radix-2 for powers of two, Bluestein
// otherwise), so it agrees with a direct O(L^2) evaluation to rounding error.
std::vector<double> power_spectrum(std::span<const double> frame, WindowKind window);

// Triangular Mel filterbank, n_mels x (floor(L/2)+1).
//
// Conventions (a reference implementation must copy these to match):
//   mel(f)     = 2595 * log10(1 + f/700)
//   n_mels + 2 points uniformly spaced in mel between 0 Hz and Nyquist;
//   filter m rises linearly from edge m-1 to center m and falls to edge m+1,
//   evaluated at the bin frequencies k * sample_rate / L;
//   each row is scaled so its largest entry is exactly 1 (peak-normalized
//   triangles, no area normalization).
//
// A filter whose support contains no FFT bin means n_mels is too dense for
// the resolution: Error(Config).
Matrix mel_matrix(const SpectralConfig& cfg);

// Full filterbank pipeline: pre-emphasis, framing, windowed power spectrum,
// Mel filtering, ln(max(energy, log_floor)). Output is T x n_mels on the
// frame_shift_ms clock, tagged FeatureSource::SF.
FeatureMatrix extract_fbank(const Waveform& w, const SpectralConfig& cfg);

}  // namespace specfuse
