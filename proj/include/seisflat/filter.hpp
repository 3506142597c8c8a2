#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "seisflat/volume.hpp"

namespace seisflat {

inline constexpr int kPatchSize = 27;

// One 27-entry column per volume pixel: the 3x3x3 cube around the pixel in a
// fixed raster order (depth offset slowest, third-axis offset fastest), with
// replicate padding at the boundary.
struct PatchMatrix {
    std::uint32_t m = 0, n = 0, l = 0;
    std::vector<double> data;  // kPatchSize values per pixel, pixel-major

    [[nodiscard]] std::size_t pixel_count() const {
        return static_cast<std::size_t>(m) * n * l;
    }
    [[nodiscard]] const double* column(std::size_t pixel) const {
        return data.data() + pixel * kPatchSize;
    }
};

// Filtered pixel values w over the full volume.
struct ScalarField {
    std::uint32_t m = 0, n = 0, l = 0;
    std::vector<double> w;

    [[nodiscard]] std::size_t index(std::uint32_t i1, std::uint32_t i2, std::uint32_t i3) const {
        return (static_cast<std::size_t>(i1) * n + i2) * l + i3;
    }
};

// Filtered feature vectors f over one slice: the 3x3x3 cube of w around each
// slice pixel, same raster order and padding as PatchMatrix.
struct FeatureField {
    std::uint32_t rows = 0, cols = 0;
    std::vector<double> f;  // kPatchSize values per pixel, row-major pixels

    [[nodiscard]] std::size_t pixel_count() const {
        return static_cast<std::size_t>(rows) * cols;
    }
    [[nodiscard]] const double* feature(std::size_t pixel) const {
        return f.data() + pixel * kPatchSize;
    }
    [[nodiscard]] const double* feature(std::uint32_t r, std::uint32_t c) const {
        return feature(static_cast<std::size_t>(r) * cols + c);
    }
};

using Cov27 = std::array<double, kPatchSize * kPatchSize>;
using Vec27 = std::array<double, kPatchSize>;

[[nodiscard]] PatchMatrix extract_patches(const SeismicVolume& v);

// Unbiased covariance (1/(N-1)) of the patch columns.
[[nodiscard]] Cov27 feature_covariance(const PatchMatrix& p);

// Top eigenvector of C by seeded power iteration; unit norm, first nonzero
// component positive. C == 0 returns e1.
[[nodiscard]] Vec27 principal_component(const Cov27& c);

[[nodiscard]] ScalarField filtered_values(const PatchMatrix& p, const Vec27& u1);

[[nodiscard]] FeatureField filtered_features(const ScalarField& w, const SeismicVolume& v,
                                             SliceRef s);

// Debug dump of w over a slice as "row,col,value" CSV.
void write_w_csv(const ScalarField& w, const SeismicVolume& v, SliceRef s,
                 const std::filesystem::path& path);

}  // namespace seisflat
