#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "seisflat/kernel.hpp"

using namespace seisflat;

namespace {

// Feature field with f(i) = value(i) * e1.
FeatureField scalar_features(std::uint32_t rows, std::uint32_t cols,
                             const std::vector<double>& values) {
    FeatureField ff;
    ff.rows = rows;
    ff.cols = cols;
    ff.f.assign(static_cast<std::size_t>(rows) * cols * kPatchSize, 0.0);
    for (std::size_t p = 0; p < values.size(); ++p) ff.f[p * kPatchSize] = values[p];
    return ff;
}

FeatureField depth_features(std::uint32_t rows, std::uint32_t cols) {
    std::vector<double> v(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) v[static_cast<std::size_t>(r) * cols + c] = r;
    return scalar_features(rows, cols, v);
}

std::set<std::pair<int, int>> offsets_of(const std::vector<int>& neigh, int row, int col,
                                         int cols) {
    std::set<std::pair<int, int>> out;
    for (int j : neigh) out.insert({j / cols - row, j % cols - col});
    return out;
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("propagation neighborhood radii") {
    NeighborhoodSpec spec;
    spec.r = 1.0;
    CHECK(propagation_neighborhood(5, 5, spec, 12, 12) == std::vector<int>{5 * 12 + 5});

    spec.r = 2.0;
    const auto n9 = propagation_neighborhood(5, 5, spec, 12, 12);
    CHECK(n9.size() == 9);
    const auto offs = offsets_of(n9, 5, 5, 12);
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) CHECK(offs.contains({dr, dc}));

    // Corner clipping.
    CHECK(propagation_neighborhood(0, 0, spec, 12, 12).size() == 4);
}

TEST_CASE("calibration neighborhood: mod-3 lattice inside strict radius") {
    NeighborhoodSpec spec;
    spec.R = 4.0;
    const auto c4 = calibration_neighborhood(5, 5, spec, 12, 12);
    const auto offs = offsets_of(c4, 5, 5, 12);
    CHECK(offs == std::set<std::pair<int, int>>{{0, 0}, {-3, 0}, {3, 0}, {0, -3}, {0, 3}});

    spec.R = 1.0;
    CHECK(calibration_neighborhood(5, 5, spec, 12, 12) == std::vector<int>{5 * 12 + 5});

    spec.R = 5.0;
    const auto c5 = calibration_neighborhood(5, 5, spec, 12, 12);
    CHECK(c5.size() == 9);  // adds the four (+-3, +-3) diagonals, norm sqrt(18) < 5
}

TEST_CASE("local scale: constant features give zero, depth features give 9") {
    NeighborhoodSpec spec;
    spec.R = 4.0;
    const FeatureField constant = scalar_features(12, 12, std::vector<double>(144, 2.0));
    CHECK(local_scale(5, 5, constant, spec) == 0.0);

    const FeatureField depth = depth_features(12, 12);
    CHECK(local_scale(5, 5, depth, spec) == 9.0);  // +-3 rows away
}

TEST_CASE("local scale matches a brute-force max") {
    NeighborhoodSpec spec;
    const FeatureField ff = oracle::random_features(10, 9, 777);
    for (int row : {0, 4, 9})
        for (int col : {0, 3, 8}) {
            double expect = 0.0;
            for (int rj = 0; rj < 10; ++rj)
                for (int cj = 0; cj < 9; ++cj) {
                    const int dr = rj - row, dc = cj - col;
                    if (dr % 3 != 0 || dc % 3 != 0) continue;
                    if (!(dr * dr + dc * dc < spec.R * spec.R)) continue;
                    double d2 = 0.0;
                    const double* a = ff.feature(static_cast<std::uint32_t>(row),
                                                 static_cast<std::uint32_t>(col));
                    const double* b = ff.feature(static_cast<std::uint32_t>(rj),
                                                 static_cast<std::uint32_t>(cj));
                    for (int k = 0; k < kPatchSize; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
                    expect = std::max(expect, d2);
                }
            CHECK(local_scale(row, col, ff, spec) == expect);
        }
}

TEST_CASE("affinity values: equal features, calibrated floor, half scale") {
    NeighborhoodSpec spec;
    spec.R = 4.0;
    // Row of scalar features engineered so pixel (5,5) sees distances
    // 0, M, M/2 inside its propagation disc.
    std::vector<double> vals(144, 0.0);
    auto id = [](int r, int c) { return r * 12 + c; };
    const double m_val = 2.0;  // M(5,5) = 4 via calibration member at (2,5)
    vals[id(5, 5)] = 0.0;
    vals[id(2, 5)] = m_val;            // calibration: distance^2 = 4
    vals[id(5, 6)] = 2.0;              // propagation: distance^2 = 4 = M
    vals[id(5, 4)] = std::sqrt(2.0);   // propagation: distance^2 = 2 = M/2
    const FeatureField ff = scalar_features(12, 12, vals);

    const CsrMatrix w = affinity_weights(ff, spec);
    CHECK(local_scale(5, 5, ff, spec) == 4.0);
    CHECK(w.at(id(5, 5), id(5, 5)) == 1.0);
    CHECK(w.at(id(5, 5), id(5, 6)) == spec.delta_floor);
    CHECK(w.at(id(5, 5), id(5, 4)) ==
          doctest::Approx(std::sqrt(spec.delta_floor)).epsilon(1e-12));
}

TEST_CASE("affinity range, floor law, and monotonicity on random features") {
    NeighborhoodSpec spec;
    const FeatureField ff = oracle::random_features(12, 12, 31337);
    const std::vector<double> scales = local_scales(ff, spec);
    const CsrMatrix w = affinity_weights(ff, spec);

    for (int i = 0; i < w.n; ++i) {
        CHECK(w.at(i, i) == 1.0);
        // Collect (distance^2, value) pairs for the monotonicity check.
        std::vector<std::pair<double, double>> entries;
        for (int k = w.row_ptr[i]; k < w.row_ptr[i + 1]; ++k) {
            const int j = w.cols[k];
            const double val = w.vals[k];
            CHECK(val >= 0.0);
            CHECK(val <= 1.0);
            double d2 = 0.0;
            const double* a = ff.feature(static_cast<std::size_t>(i));
            const double* b = ff.feature(static_cast<std::size_t>(j));
            for (int t = 0; t < kPatchSize; ++t) d2 += (a[t] - b[t]) * (a[t] - b[t]);
            if (d2 <= scales[i]) CHECK(val >= spec.delta_floor);
            entries.emplace_back(d2, val);
        }
        std::sort(entries.begin(), entries.end());
        for (std::size_t t = 1; t < entries.size(); ++t)
            if (entries[t].first > entries[t - 1].first)
                CHECK(entries[t].second < entries[t - 1].second);
    }
}

TEST_CASE("symmetrize: symmetric input unchanged, half rule for one-sided entries") {
    NeighborhoodSpec spec;
    spec.R = 4.0;

    // Degenerate row j: all calibration members of (4,4) equal its feature,
    // so M(4,4)=0 while its neighbor (4,5) differs -> W((4,4),(4,5)) = 0.
    // The reverse direction is tuned to exactly delta_floor.
    std::vector<double> vals(81, 0.0);
    auto id = [](int r, int c) { return r * 9 + c; };
    vals[id(4, 5)] = 2.0;
    vals[id(1, 5)] = 4.0;  // calibration member of (4,5): distance^2 = 4
    const FeatureField ff = scalar_features(9, 9, vals);

    CHECK(local_scale(4, 4, ff, spec) == 0.0);
    CHECK(local_scale(4, 5, ff, spec) == 4.0);

    const CsrMatrix w = affinity_weights(ff, spec);
    CHECK(w.at(id(4, 5), id(4, 4)) == spec.delta_floor);  // distance^2 = 4 = M
    CHECK(w.at(id(4, 4), id(4, 5)) == 0.0);

    const SparseAffinity k = symmetrize(w, 9, 9);
    CHECK(k.k.at(id(4, 4), id(4, 5)) == 0.5 * spec.delta_floor);
    CHECK(k.k.at(id(4, 5), id(4, 4)) == 0.5 * spec.delta_floor);
}

TEST_CASE("symmetrized kernel equals the dense oracle on a 12x12 slice") {
    NeighborhoodSpec spec;
    const FeatureField ff = oracle::random_features(12, 12, 99);
    const CsrMatrix w = affinity_weights(ff, spec);
    const SparseAffinity k = symmetrize(w, 12, 12);
    const oracle::DenseKernel dk = oracle::dense_kernel(ff, spec);

    for (int i = 0; i < k.k.n; ++i)
        for (int j = 0; j < k.k.n; ++j) {
            CHECK(k.k.at(i, j) == dk.k[static_cast<std::size_t>(i) * dk.n + j]);
            CHECK(w.at(i, j) == dk.w[static_cast<std::size_t>(i) * dk.n + j]);
        }
}

TEST_CASE("kernel symmetry is exact and sparsity follows the neighborhoods") {
    NeighborhoodSpec spec;
    const FeatureField ff = oracle::random_features(11, 13, 12345);
    const SparseAffinity k = symmetrize(affinity_weights(ff, spec), 11, 13);

    for (int i = 0; i < k.k.n; ++i)
        for (int idx = k.k.row_ptr[i]; idx < k.k.row_ptr[i + 1]; ++idx) {
            const int j = k.k.cols[idx];
            CHECK(k.k.at(j, i) == k.k.vals[idx]);  // exact, not approximate
            CHECK(k.k.vals[idx] >= 0.0);
            CHECK(k.k.vals[idx] <= 1.0);
        }

    for (int r = 0; r < 11; ++r)
        for (int c = 0; c < 13; ++c) {
            const int i = r * 13 + c;
            const auto neigh = propagation_neighborhood(r, c, spec, 11, 13);
            // Pattern within the union bound: |N_r(i)| + |{j : i in N_r(j)}|.
            CHECK(k.k.row_ptr[i + 1] - k.k.row_ptr[i] <= 2 * static_cast<int>(neigh.size()));
            for (int idx = k.k.row_ptr[i]; idx < k.k.row_ptr[i + 1]; ++idx)
                CHECK(std::binary_search(neigh.begin(), neigh.end(), k.k.cols[idx]));
        }
}

TEST_CASE("spec validation rejects bad parameters") {
    NeighborhoodSpec spec;
    spec.r = 5.0;
    spec.R = 2.0;
    CHECK_THROWS_AS(spec.validate(), validation_error);
    spec = NeighborhoodSpec{};
    spec.delta_floor = 1.5;
    CHECK_THROWS_AS(spec.validate(), validation_error);
}

}  // TEST_SUITE
