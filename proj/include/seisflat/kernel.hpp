#pragma once

#include <cmath>
#include <filesystem>
#include <vector>

#include "seisflat/filter.hpp"
#include "seisflat/sparse.hpp"

namespace seisflat {

// Kernel parameters. Distances are strict (< r, < R); the calibration
// neighborhood lives on the mod-`stride` pixel lattice anchored at each
// pixel, so calibration feature cubes do not overlap.
struct NeighborhoodSpec {
    double r = 2.0;
    double R = 5.0;
    double delta_floor = 1e-7;
    int stride = 3;

    [[nodiscard]] double bandwidth() const { return -1.0 / std::log(delta_floor); }

    void validate() const {
        if (!(r > 0.0) || !(R > r)) throw validation_error("require 0 < r < R");
        if (!(delta_floor > 0.0) || !(delta_floor < 1.0))
            throw validation_error("delta_floor must lie in (0, 1)");
        if (stride < 1) throw validation_error("stride must be >= 1");
    }
};

// Symmetric affinity over slice pixels (row-major linear indexing).
struct SparseAffinity {
    std::uint32_t rows = 0, cols = 0;
    CsrMatrix k;

    [[nodiscard]] int pixel_count() const { return k.n; }
};

// Pixels within Euclidean distance < r of (row, col), clipped to the slice,
// as sorted linear indices. Includes the pixel itself.
[[nodiscard]] std::vector<int> propagation_neighborhood(int row, int col,
                                                        const NeighborhoodSpec& spec,
                                                        int rows, int cols);

// Same, restricted to offsets that are multiples of `stride` in both
// coordinates and within distance < R.
[[nodiscard]] std::vector<int> calibration_neighborhood(int row, int col,
                                                        const NeighborhoodSpec& spec,
                                                        int rows, int cols);

// M(i): max squared feature distance over the calibration neighborhood.
[[nodiscard]] double local_scale(int row, int col, const FeatureField& features,
                                 const NeighborhoodSpec& spec);

[[nodiscard]] std::vector<double> local_scales(const FeatureField& features,
                                               const NeighborhoodSpec& spec);

// Asymmetric kernel W(i,j) = exp(-||f(i)-f(j)||^2 / (beta*M(i))) on the
// propagation neighborhood. Rows with M(i) = 0 connect exactly the pixels
// with identical features. Within calibration scale the value never drops
// below delta_floor.
[[nodiscard]] CsrMatrix affinity_weights(const FeatureField& features,
                                         const NeighborhoodSpec& spec);

// K = (W + W^T)/2, exactly symmetric, pattern = union of both orientations.
[[nodiscard]] SparseAffinity symmetrize(const CsrMatrix& w, std::uint32_t rows,
                                        std::uint32_t cols);

// Text dump "i j value" of the symmetric kernel, one entry per line.
void write_affinity_triplets(const SparseAffinity& k, const std::filesystem::path& path);

}  // namespace seisflat
