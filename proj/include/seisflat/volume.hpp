#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "seisflat/common.hpp"

namespace seisflat {

// m x n x l scalar field; first index is depth. Values are stored with the
// third index fastest and the depth index slowest:
//   value(i1,i2,i3) lives at (i1*n + i2)*l + i3.
struct SeismicVolume {
    std::uint32_t m = 0, n = 0, l = 0;
    std::vector<float> values;

    [[nodiscard]] std::size_t pixel_count() const {
        return static_cast<std::size_t>(m) * n * l;
    }
    [[nodiscard]] std::size_t index(std::uint32_t i1, std::uint32_t i2, std::uint32_t i3) const {
        return (static_cast<std::size_t>(i1) * n + i2) * l + i3;
    }
    [[nodiscard]] float at(std::uint32_t i1, std::uint32_t i2, std::uint32_t i3) const {
        return values[index(i1, i2, i3)];
    }
    float& at(std::uint32_t i1, std::uint32_t i2, std::uint32_t i3) {
        return values[index(i1, i2, i3)];
    }
};

// Which of the two non-depth axes is held fixed when cutting a slice.
enum class SliceAxis { i2, i3 };

struct SliceRef {
    SliceAxis axis = SliceAxis::i3;
    std::uint32_t index = 0;
};

struct LayerWave {
    double frequency = 0.0;  // cycles per depth unit
    double amplitude = 0.0;
};

struct SynthSpec {
    std::uint32_t m = 0, n = 0, l = 0;
    std::vector<LayerWave> layers;
    double warp_amplitude = 0.0;  // pixels
    double warp_frequency = 0.0;  // cycles across width
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

// Lateral displacement of the layer stack at (i2, i3).
[[nodiscard]] double synth_warp(const SynthSpec& spec, std::uint32_t i2, std::uint32_t i3);

// v(i1,i2,i3) = sum_f amp*sin(2*pi*freq*(i1 + warp(i2,i3))) + noise, with
// seeded Gaussian noise. Pure function of the spec.
[[nodiscard]] SeismicVolume synthesize_volume(const SynthSpec& spec);

// SVOL container: "SVOL" magic, u32 version (=1), u32 dims m,n,l, then
// 4*m*n*l bytes of little-endian float32 payload.
void save_volume(const SeismicVolume& v, const std::filesystem::path& path);
[[nodiscard]] SeismicVolume load_volume(const std::filesystem::path& path);

// Row-major 2D image; row 0 is the shallowest depth.
struct Image {
    std::uint32_t rows = 0, cols = 0;
    std::vector<float> values;

    [[nodiscard]] float at(std::uint32_t r, std::uint32_t c) const {
        return values[static_cast<std::size_t>(r) * cols + c];
    }
    float& at(std::uint32_t r, std::uint32_t c) {
        return values[static_cast<std::size_t>(r) * cols + c];
    }
};

[[nodiscard]] Image extract_slice(const SeismicVolume& v, SliceRef s);

// Binary PGM (P5), min -> 0, max -> 255; a constant image renders mid-gray.
void render_pgm(const Image& img, const std::filesystem::path& path);

namespace detail {
void write_pgm_bytes(const std::filesystem::path& path, std::uint32_t width,
                     std::uint32_t height, const std::vector<std::uint8_t>& bytes);
// Volume coordinates of slice pixel (row, col).
void slice_coords(const SeismicVolume& v, SliceRef s, std::uint32_t row, std::uint32_t col,
                  std::uint32_t& i1, std::uint32_t& i2, std::uint32_t& i3);
[[nodiscard]] std::uint32_t slice_width(const SeismicVolume& v, SliceRef s);
}  // namespace detail

}  // namespace seisflat
