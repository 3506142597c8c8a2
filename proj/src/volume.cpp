#include "seisflat/volume.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace seisflat {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'V', 'O', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 20;  // magic + version + dims

void check_dims_nonzero(std::uint32_t m, std::uint32_t n, std::uint32_t l) {
    if (m == 0 || n == 0 || l == 0)
        throw dimension_error("volume dimensions must all be >= 1, got " +
                              std::to_string(m) + "x" + std::to_string(n) + "x" +
                              std::to_string(l));
}

void append_u32(std::string& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint32_t read_u32(const std::string& buf, std::size_t off) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + b])) << (8 * b);
    return v;
}

}  // namespace

double synth_warp(const SynthSpec& spec, std::uint32_t i2, std::uint32_t i3) {
    const double two_pi = 2.0 * std::numbers::pi;
    return spec.warp_amplitude *
           std::sin(two_pi * spec.warp_frequency * static_cast<double>(i2) / spec.n) *
           std::cos(two_pi * spec.warp_frequency * static_cast<double>(i3) / spec.l);
}

SeismicVolume synthesize_volume(const SynthSpec& spec) {
    check_dims_nonzero(spec.m, spec.n, spec.l);
    if (spec.m < 4 || spec.n < 4 || spec.l < 4)
        throw dimension_error("synthesis requires dims >= 4x4x4");
    if (spec.noise_sigma < 0.0) throw validation_error("noise_sigma must be >= 0");
    if (spec.warp_amplitude < 0.0) throw validation_error("warp_amplitude must be >= 0");

    SeismicVolume v;
    v.m = spec.m;
    v.n = spec.n;
    v.l = spec.l;
    v.values.resize(v.pixel_count());

    const double two_pi = 2.0 * std::numbers::pi;
    std::size_t p = 0;
    for (std::uint32_t i1 = 0; i1 < spec.m; ++i1) {
        for (std::uint32_t i2 = 0; i2 < spec.n; ++i2) {
            for (std::uint32_t i3 = 0; i3 < spec.l; ++i3, ++p) {
                const double phase = static_cast<double>(i1) + synth_warp(spec, i2, i3);
                double s = 0.0;
                for (const auto& w : spec.layers)
                    s += w.amplitude * std::sin(two_pi * w.frequency * phase);
                if (spec.noise_sigma > 0.0)
                    s += spec.noise_sigma * gaussian_at(spec.seed, p);
                v.values[p] = static_cast<float>(s);
            }
        }
    }
    return v;
}

void save_volume(const SeismicVolume& v, const std::filesystem::path& path) {
    check_dims_nonzero(v.m, v.n, v.l);
    if (v.values.size() != v.pixel_count())
        throw validation_error("volume value count does not match dimensions");
    for (std::size_t i = 0; i < v.values.size(); ++i)
        if (!std::isfinite(v.values[i]))
            throw validation_error("volume contains a non-finite value at linear index " +
                                   std::to_string(i));

    std::string buf;
    buf.reserve(kHeaderBytes + 4 * v.values.size());
    buf.append(kMagic.data(), kMagic.size());
    append_u32(buf, kVersion);
    append_u32(buf, v.m);
    append_u32(buf, v.n);
    append_u32(buf, v.l);
    for (float x : v.values) {
        std::uint32_t bits;
        static_assert(sizeof(bits) == sizeof(x));
        std::memcpy(&bits, &x, 4);
        append_u32(buf, bits);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw format_error("write failure: " + path.string());
}

SeismicVolume load_volume(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < kHeaderBytes)
        throw format_error("truncated header at offset " + std::to_string(buf.size()) +
                           ": expected " + std::to_string(kHeaderBytes) + " header bytes");
    if (std::memcmp(buf.data(), kMagic.data(), 4) != 0)
        throw format_error("bad magic at offset 0: expected \"SVOL\"");
    const std::uint32_t version = read_u32(buf, 4);
    if (version != kVersion)
        throw format_error("unsupported version " + std::to_string(version) +
                           " at offset 4: expected 1");

    SeismicVolume v;
    v.m = read_u32(buf, 8);
    v.n = read_u32(buf, 12);
    v.l = read_u32(buf, 16);
    check_dims_nonzero(v.m, v.n, v.l);

    const std::size_t expected = 4 * v.pixel_count();
    const std::size_t actual = buf.size() - kHeaderBytes;
    if (actual != expected)
        throw format_error("payload length mismatch at offset " + std::to_string(kHeaderBytes) +
                           ": expected " + std::to_string(expected) + " bytes, found " +
                           std::to_string(actual));

    v.values.resize(v.pixel_count());
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        const std::uint32_t bits = read_u32(buf, kHeaderBytes + 4 * i);
        float x;
        std::memcpy(&x, &bits, 4);
        if (!std::isfinite(x))
            throw format_error("non-finite value at linear index " + std::to_string(i));
        v.values[i] = x;
    }
    return v;
}

namespace detail {

std::uint32_t slice_width(const SeismicVolume& v, SliceRef s) {
    return s.axis == SliceAxis::i2 ? v.l : v.n;
}

void slice_coords(const SeismicVolume& v, SliceRef s, std::uint32_t row, std::uint32_t col,
                  std::uint32_t& i1, std::uint32_t& i2, std::uint32_t& i3) {
    (void)v;
    i1 = row;
    if (s.axis == SliceAxis::i2) {
        i2 = s.index;
        i3 = col;
    } else {
        i2 = col;
        i3 = s.index;
    }
}

void write_pgm_bytes(const std::filesystem::path& path, std::uint32_t width,
                     std::uint32_t height, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw format_error("write failure: " + path.string());
}

}  // namespace detail

Image extract_slice(const SeismicVolume& v, SliceRef s) {
    check_dims_nonzero(v.m, v.n, v.l);
    const std::uint32_t fixed_extent = s.axis == SliceAxis::i2 ? v.n : v.l;
    if (s.index >= fixed_extent)
        throw dimension_error("slice index " + std::to_string(s.index) +
                              " out of range (extent " + std::to_string(fixed_extent) + ")");

    Image img;
    img.rows = v.m;
    img.cols = detail::slice_width(v, s);
    img.values.resize(static_cast<std::size_t>(img.rows) * img.cols);
    for (std::uint32_t r = 0; r < img.rows; ++r) {
        for (std::uint32_t c = 0; c < img.cols; ++c) {
            std::uint32_t i1, i2, i3;
            detail::slice_coords(v, s, r, c, i1, i2, i3);
            img.at(r, c) = v.at(i1, i2, i3);
        }
    }
    return img;
}

void render_pgm(const Image& img, const std::filesystem::path& path) {
    if (img.rows == 0 || img.cols == 0) throw dimension_error("cannot render empty image");
    float lo = img.values[0], hi = img.values[0];
    for (float x : img.values) {
        if (!std::isfinite(x)) throw validation_error("image contains a non-finite value");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }

    std::vector<std::uint8_t> bytes(img.values.size());
    if (hi == lo) {
        std::fill(bytes.begin(), bytes.end(), std::uint8_t{128});
    } else {
        const double span = static_cast<double>(hi) - static_cast<double>(lo);
        for (std::size_t i = 0; i < img.values.size(); ++i) {
            const double t = (static_cast<double>(img.values[i]) - lo) / span;
            long px = std::lround(t * 255.0);
            px = std::clamp(px, 0L, 255L);
            bytes[i] = static_cast<std::uint8_t>(px);
        }
    }
    detail::write_pgm_bytes(path, img.cols, img.rows, bytes);
}

}  // namespace seisflat
