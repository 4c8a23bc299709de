#include "specfuse/feat_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "specfuse/error.hpp"

namespace specfuse {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'A', 'T'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderSize = 18;

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    buf.push_back(static_cast<std::uint8_t>(v & 0xFF));
    buf.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    buf.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    buf.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& buf, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(buf, bits);
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const std::uint8_t* p) {
    const std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

[[noreturn]] void format_error(const std::string& what, std::size_t offset) {
    raise(ErrorKind::Format, "FEAT: " + what + " at byte offset " + std::to_string(offset));
}

}  // namespace

void save_features(const std::string& path, const FeatureMatrix& fm) {
    const std::size_t t = fm.frames();
    const std::size_t d = fm.dim();
    if (t > std::numeric_limits<std::uint32_t>::max() ||
        d > std::numeric_limits<std::uint32_t>::max())
        raise(ErrorKind::InvalidArgument, "FEAT: matrix too large for the container");

    std::vector<std::uint8_t> buf;
    buf.reserve(kHeaderSize + 4 * t * d);
    buf.insert(buf.end(), kMagic, kMagic + 4);
    buf.push_back(kVersion);
    put_u32(buf, static_cast<std::uint32_t>(t));
    put_u32(buf, static_cast<std::uint32_t>(d));
    put_f32(buf, static_cast<float>(fm.frame_shift_ms));
    buf.push_back(static_cast<std::uint8_t>(fm.source));
    for (std::size_t r = 0; r < t; ++r)
        for (std::size_t c = 0; c < d; ++c)
            put_f32(buf, static_cast<float>(fm.data(r, c)));

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) raise(ErrorKind::Format, "FEAT: cannot open '" + path + "' for writing");
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) raise(ErrorKind::Format, "FEAT: short write to '" + path + "'");
}

FeatureMatrix load_features(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) raise(ErrorKind::Format, "FEAT: cannot open '" + path + "'");
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());

    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
        format_error("missing or bad magic", 0);
    if (buf.size() < 5 || buf[4] != kVersion)
        format_error("unsupported version", 4);
    if (buf.size() < kHeaderSize)
        format_error("truncated header", buf.size());

    const std::uint32_t t = get_u32(buf.data() + 5);
    const std::uint32_t d = get_u32(buf.data() + 9);
    const float shift = get_f32(buf.data() + 13);
    const std::uint8_t tag = buf[17];
    if (tag > 2) format_error("unknown source tag", 17);
    if (!(shift > 0.0f) || !std::isfinite(shift)) format_error("invalid frame shift", 13);

    const std::size_t expected = static_cast<std::size_t>(t) * d * 4;
    if (buf.size() - kHeaderSize < expected)
        format_error("payload truncated: expected " + std::to_string(expected) +
                         " bytes, found " + std::to_string(buf.size() - kHeaderSize),
                     buf.size());

    FeatureMatrix fm;
    fm.frame_shift_ms = static_cast<double>(shift);
    fm.source = static_cast<FeatureSource>(tag);
    fm.data = Matrix(t, d);
    for (std::size_t r = 0; r < t; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            const std::size_t off = kHeaderSize + 4 * (r * d + c);
            const float v = get_f32(buf.data() + off);
            if (!std::isfinite(v))
                raise(ErrorKind::InvalidData,
                      "FEAT: non-finite value at row " + std::to_string(r) + " col " +
                          std::to_string(c) + " (byte offset " + std::to_string(off) + ")");
            fm.data(r, c) = static_cast<double>(v);
        }
    }
    return fm;
}

}  // namespace specfuse
