#include "specfuse/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "specfuse/error.hpp"

namespace specfuse {

namespace {

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xFF));
    b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    b.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    b.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xFF));
    b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

[[noreturn]] void wav_error(const std::string& what) {
    raise(ErrorKind::Format, "WAV: " + what);
}

}  // namespace

Waveform read_wav(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) wav_error("cannot open '" + path + "'");
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());

    if (buf.size() < 44) wav_error("file shorter than the 44-byte canonical header");
    if (std::memcmp(buf.data(), "RIFF", 4) != 0) wav_error("missing RIFF tag");
    if (std::memcmp(buf.data() + 8, "WAVE", 4) != 0) wav_error("missing WAVE tag");
    if (std::memcmp(buf.data() + 12, "fmt ", 4) != 0) wav_error("missing fmt chunk");
    if (get_u32(buf.data() + 16) != 16) wav_error("non-canonical fmt chunk size");

    const std::uint16_t audio_format = get_u16(buf.data() + 20);
    const std::uint16_t channels = get_u16(buf.data() + 22);
    const std::uint32_t sample_rate = get_u32(buf.data() + 24);
    const std::uint16_t bits = get_u16(buf.data() + 34);
    if (audio_format != 1) wav_error("compressed audio is not supported (format tag " +
                                     std::to_string(audio_format) + ")");
    if (channels != 1) wav_error("only mono input is supported (" + std::to_string(channels) +
                                 " channels)");
    if (bits != 16) wav_error("only 16-bit PCM is supported (" + std::to_string(bits) + " bits)");
    if (sample_rate == 0) wav_error("zero sample rate");
    if (std::memcmp(buf.data() + 36, "data", 4) != 0) wav_error("missing data chunk");

    const std::uint32_t data_size = get_u32(buf.data() + 40);
    if (data_size % 2 != 0) wav_error("odd PCM16 data size");
    if (buf.size() - 44 < data_size) wav_error("data chunk truncated");

    Waveform w;
    w.sample_rate = static_cast<int>(sample_rate);
    const std::size_t n = data_size / 2;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint16_t raw = get_u16(buf.data() + 44 + 2 * i);
        const std::int16_t s = static_cast<std::int16_t>(raw);
        w.samples[i] = static_cast<double>(s) / 32768.0;
    }
    return w;
}

void write_wav(const std::string& path, const Waveform& w) {
    const std::uint32_t n = static_cast<std::uint32_t>(w.samples.size());
    const std::uint32_t data_size = 2 * n;

    std::vector<std::uint8_t> buf;
    buf.reserve(44 + data_size);
    buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
    put_u32(buf, 36 + data_size);
    buf.insert(buf.end(), {'W', 'A', 'V', 'E'});
    buf.insert(buf.end(), {'f', 'm', 't', ' '});
    put_u32(buf, 16);
    put_u16(buf, 1);  // PCM
    put_u16(buf, 1);  // mono
    put_u32(buf, static_cast<std::uint32_t>(w.sample_rate));
    put_u32(buf, static_cast<std::uint32_t>(w.sample_rate) * 2);
    put_u16(buf, 2);   // block align
    put_u16(buf, 16);  // bits per sample
    buf.insert(buf.end(), {'d', 'a', 't', 'a'});
    put_u32(buf, data_size);
    for (double s : w.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        const auto q = static_cast<std::int16_t>(
            std::clamp(std::llround(clamped * 32767.0), -32768LL, 32767LL));
        put_u16(buf, static_cast<std::uint16_t>(q));
    }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) wav_error("cannot open '" + path + "' for writing");
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) wav_error("short write to '" + path + "'");
}

}  // namespace specfuse
