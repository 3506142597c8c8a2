#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "seisflat/volume.hpp"

namespace seisflat {

// Recovered height per slice pixel, radians in [0, pi].
struct DepthMap {
    std::uint32_t rows = 0, cols = 0;
    std::vector<double> h;
};

struct CloudRecord {
    double x;      // original column coordinate
    double h;      // recovered height
    double value;  // original pixel value
};

struct FlattenedCloud {
    std::uint32_t rows = 0, cols = 0;
    std::vector<CloudRecord> records;
};

enum class CloudFormat { csv, pgm };

// Fix the arbitrary eigenvector sign so the recovered height increases with
// image depth: the mean over the top quarter of depth rows must be >= the
// mean over the bottom quarter. A constant eigenvector cannot orient.
[[nodiscard]] std::vector<double> orient_first_eigenvector(std::vector<double> psi1,
                                                           std::uint32_t rows,
                                                           std::uint32_t cols);

// h = arccos(2*(psi1 - min)/(max - min) - 1); the affine map targets [-1, 1]
// so a cos(pi y) eigenvector recovers pi*y exactly.
[[nodiscard]] DepthMap depth_from_eigenvector(const std::vector<double>& psi1,
                                              std::uint32_t rows, std::uint32_t cols);

[[nodiscard]] FlattenedCloud reparameterize(const Image& slice, const DepthMap& depth);

// CSV: header "x,h,value", 9 significant digits. PGM: records binned onto the
// original grid by nearest-h row, empty bins mid-gray.
void export_cloud(const FlattenedCloud& cloud, const std::filesystem::path& path,
                  CloudFormat format);

}  // namespace seisflat
