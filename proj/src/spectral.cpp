#include "specfuse/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>

namespace specfuse {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 FFT with a precomputed root table.
struct Fft {
    std::size_t n = 0;
    std::vector<std::complex<double>> roots;  // e^{-2 pi i j / n}, j < n/2

    explicit Fft(std::size_t size) : n(size) {
        roots.resize(n / 2);
        for (std::size_t j = 0; j < n / 2; ++j)
            roots[j] = std::polar(1.0, -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n));
    }

    void forward(std::vector<std::complex<double>>& a) const {
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t stride = n / len;
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t j = 0; j < len / 2; ++j) {
                    const auto w = roots[j * stride];
                    const auto u = a[i + j];
                    const auto v = a[i + j + len / 2] * w;
                    a[i + j] = u + v;
                    a[i + j + len / 2] = u - v;
                }
            }
        }
    }

    void inverse(std::vector<std::complex<double>>& a) const {
        for (auto& x : a) x = std::conj(x);
        forward(a);
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x = std::conj(x) * inv;
    }
};

// Exact L-point DFT for arbitrary L. Powers of two go straight through the
// radix-2 transform; other lengths use Bluestein's chirp-z reformulation,
// which still evaluates the true L-point DFT (no zero-pad truncation).
struct DftPlan {
    std::size_t length;
    bool pow2;
    Fft fft;
    std::vector<std::complex<double>> chirp;  // e^{-i pi n^2 / L}
    std::vector<std::complex<double>> fft_b;  // spectrum of the chirp kernel

    explicit DftPlan(std::size_t L)
        : length(L), pow2(is_pow2(L)), fft(pow2 ? L : next_pow2(2 * L - 1)) {
        if (pow2) return;
        const std::size_t m = fft.n;
        chirp.resize(L);
        for (std::size_t k = 0; k < L; ++k) {
            // n^2 mod 2L keeps the trig argument small for accuracy.
            const std::uint64_t q = (static_cast<std::uint64_t>(k) * k) % (2 * L);
            chirp[k] = std::polar(1.0, -kPi * static_cast<double>(q) / static_cast<double>(L));
        }
        std::vector<std::complex<double>> b(m, {0.0, 0.0});
        b[0] = std::conj(chirp[0]);
        for (std::size_t k = 1; k < L; ++k) {
            b[k] = std::conj(chirp[k]);
            b[m - k] = std::conj(chirp[k]);
        }
        fft.forward(b);
        fft_b = std::move(b);
    }

    std::vector<std::complex<double>> transform(std::span<const double> x) const {
        if (pow2) {
            std::vector<std::complex<double>> a(length);
            for (std::size_t i = 0; i < length; ++i) a[i] = {x[i], 0.0};
            fft.forward(a);
            return a;
        }
        const std::size_t m = fft.n;
        std::vector<std::complex<double>> a(m, {0.0, 0.0});
        for (std::size_t i = 0; i < length; ++i) a[i] = x[i] * chirp[i];
        fft.forward(a);
        for (std::size_t i = 0; i < m; ++i) a[i] *= fft_b[i];
        fft.inverse(a);
        std::vector<std::complex<double>> out(length);
        for (std::size_t k = 0; k < length; ++k) out[k] = a[k] * chirp[k];
        return out;
    }
};

std::vector<double> power_from_plan(const DftPlan& plan, std::span<const double> windowed) {
    const auto spec = plan.transform(windowed);
    std::vector<double> power(plan.length / 2 + 1);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(spec[k]);
    return power;
}

}  // namespace

int SpectralConfig::frame_length_samples() const {
    return static_cast<int>(std::llround(frame_length_ms * sample_rate / 1000.0));
}

int SpectralConfig::frame_shift_samples() const {
    return static_cast<int>(std::llround(frame_shift_ms * sample_rate / 1000.0));
}

void SpectralConfig::validate() const {
    if (sample_rate <= 0)
        raise(ErrorKind::Config, "spectral config: sample_rate must be positive");
    if (!(frame_shift_ms > 0.0) || frame_length_ms < frame_shift_ms)
        raise(ErrorKind::Config, "spectral config: need frame_length_ms >= frame_shift_ms > 0");
    if (n_mels < 1)
        raise(ErrorKind::Config, "spectral config: n_mels must be >= 1");
    if (pre_emphasis < 0.0 || pre_emphasis >= 1.0)
        raise(ErrorKind::Config, "spectral config: pre_emphasis must be in [0, 1)");
    if (!(log_floor > 0.0))
        raise(ErrorKind::Config, "spectral config: log_floor must be positive");
    if (frame_length_samples() < 1 || frame_shift_samples() < 1)
        raise(ErrorKind::Config, "spectral config: frame geometry collapses to zero samples");
}

Waveform pre_emphasize(const Waveform& w, double coeff) {
    if (coeff < 0.0 || coeff >= 1.0)
        raise(ErrorKind::InvalidArgument, "pre_emphasize: coefficient must be in [0, 1)");
    for (double s : w.samples)
        if (!std::isfinite(s))
            raise(ErrorKind::InvalidData, "pre_emphasize: non-finite sample in waveform");
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples.resize(w.samples.size());
    if (!w.samples.empty()) {
        out.samples[0] = w.samples[0];
        for (std::size_t t = 1; t < w.samples.size(); ++t)
            out.samples[t] = w.samples[t] - coeff * w.samples[t - 1];
    }
    return out;
}

std::vector<std::span<const double>> frame_signal(const Waveform& w, const SpectralConfig& cfg) {
    cfg.validate();
    const std::size_t L = static_cast<std::size_t>(cfg.frame_length_samples());
    const std::size_t H = static_cast<std::size_t>(cfg.frame_shift_samples());
    std::vector<std::span<const double>> frames;
    if (w.samples.size() < L) return frames;
    const std::size_t count = (w.samples.size() - L) / H + 1;
    frames.reserve(count);
    for (std::size_t t = 0; t < count; ++t)
        frames.emplace_back(w.samples.data() + t * H, L);
    return frames;
}

std::vector<double> make_window(WindowKind kind, std::size_t length) {
    std::vector<double> win(length, 1.0);
    if (kind == WindowKind::Hann && length > 1) {
        for (std::size_t n = 0; n < length; ++n)
            win[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(n) /
                                          static_cast<double>(length - 1));
    }
    return win;
}

std::vector<double> power_spectrum(std::span<const double> frame, WindowKind window) {
    if (frame.empty())
        raise(ErrorKind::InvalidArgument, "power_spectrum: empty frame");
    const auto win = make_window(window, frame.size());
    std::vector<double> buf(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i] * win[i];
    DftPlan plan(frame.size());
    return power_from_plan(plan, buf);
}

Matrix mel_matrix(const SpectralConfig& cfg) {
    cfg.validate();
    const std::size_t L = static_cast<std::size_t>(cfg.frame_length_samples());
    const std::size_t n_bins = L / 2 + 1;
    const double mel_max = hz_to_mel(cfg.sample_rate / 2.0);

    std::vector<double> edge_hz(static_cast<std::size_t>(cfg.n_mels) + 2);
    for (std::size_t i = 0; i < edge_hz.size(); ++i)
        edge_hz[i] = mel_to_hz(mel_max * static_cast<double>(i) /
                               static_cast<double>(cfg.n_mels + 1));

    Matrix fb(static_cast<std::size_t>(cfg.n_mels), n_bins);
    for (int m = 1; m <= cfg.n_mels; ++m) {
        const double lo = edge_hz[static_cast<std::size_t>(m) - 1];
        const double center = edge_hz[static_cast<std::size_t>(m)];
        const double hi = edge_hz[static_cast<std::size_t>(m) + 1];
        double row_max = 0.0;
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * cfg.sample_rate / static_cast<double>(L);
            double weight = 0.0;
            if (f == center) {
                weight = 1.0;
            } else if (f > lo && f < center) {
                weight = (f - lo) / (center - lo);
            } else if (f > center && f < hi) {
                weight = (hi - f) / (hi - center);
            }
            fb(static_cast<std::size_t>(m) - 1, k) = weight;
            row_max = std::max(row_max, weight);
        }
        if (row_max <= 0.0)
            raise(ErrorKind::Config,
                  "mel_matrix: filter " + std::to_string(m) +
                      " covers no FFT bin; n_mels too large for the frame resolution");
        for (std::size_t k = 0; k < n_bins; ++k)
            fb(static_cast<std::size_t>(m) - 1, k) /= row_max;
    }
    return fb;
}

FeatureMatrix extract_fbank(const Waveform& w, const SpectralConfig& cfg) {
    cfg.validate();
    if (w.sample_rate != cfg.sample_rate)
        raise(ErrorKind::Config, "extract_fbank: waveform sample rate " +
                                     std::to_string(w.sample_rate) +
                                     " does not match config sample rate " +
                                     std::to_string(cfg.sample_rate));

    const Waveform emphasized = pre_emphasize(w, cfg.pre_emphasis);
    const auto frames = frame_signal(emphasized, cfg);
    const std::size_t L = static_cast<std::size_t>(cfg.frame_length_samples());
    const std::size_t n_bins = L / 2 + 1;
    const Matrix mel = mel_matrix(cfg);
    const auto win = make_window(cfg.window, L);
    const DftPlan plan(L);

    FeatureMatrix out;
    out.frame_shift_ms = cfg.frame_shift_ms;
    out.source = FeatureSource::SF;
    out.data = Matrix(frames.size(), static_cast<std::size_t>(cfg.n_mels));

    std::vector<double> buf(L);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        for (std::size_t i = 0; i < L; ++i) buf[i] = frames[t][i] * win[i];
        const auto power = power_from_plan(plan, buf);
        for (int m = 0; m < cfg.n_mels; ++m) {
            double energy = 0.0;
            for (std::size_t k = 0; k < n_bins; ++k)
                energy += mel(static_cast<std::size_t>(m), k) * power[k];
            out.data(t, static_cast<std::size_t>(m)) = std::log(std::max(energy, cfg.log_floor));
        }
    }
    return out;
}

}  // namespace specfuse
