#include "seisflat/kernel.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace seisflat {

namespace {

double feature_dist_sq(const double* a, const double* b) {
    double s = 0.0;
    for (int k = 0; k < kPatchSize; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

bool features_equal(const double* a, const double* b) {
    for (int k = 0; k < kPatchSize; ++k)
        if (a[k] != b[k]) return false;
    return true;
}

std::vector<int> lattice_disc(int row, int col, double radius, int step, int rows, int cols) {
    std::vector<int> out;
    const int reach = static_cast<int>(std::ceil(radius));
    const double r_sq = radius * radius;
    for (int dr = -reach; dr <= reach; dr += step) {
        const int rr = row + dr;
        if (rr < 0 || rr >= rows) continue;
        for (int dc = -reach; dc <= reach; dc += step) {
            const int cc = col + dc;
            if (cc < 0 || cc >= cols) continue;
            if (static_cast<double>(dr) * dr + static_cast<double>(dc) * dc < r_sq)
                out.push_back(rr * cols + cc);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<int> propagation_neighborhood(int row, int col, const NeighborhoodSpec& spec,
                                          int rows, int cols) {
    spec.validate();
    return lattice_disc(row, col, spec.r, 1, rows, cols);
}

std::vector<int> calibration_neighborhood(int row, int col, const NeighborhoodSpec& spec,
                                          int rows, int cols) {
    spec.validate();
    return lattice_disc(row, col, spec.R, spec.stride, rows, cols);
}

double local_scale(int row, int col, const FeatureField& features, const NeighborhoodSpec& spec) {
    const int rows = static_cast<int>(features.rows);
    const int cols = static_cast<int>(features.cols);
    const double* fi = features.feature(static_cast<std::size_t>(row) * cols + col);
    double m = 0.0;
    for (int j : calibration_neighborhood(row, col, spec, rows, cols))
        m = std::max(m, feature_dist_sq(fi, features.feature(j)));
    return m;
}

std::vector<double> local_scales(const FeatureField& features, const NeighborhoodSpec& spec) {
    std::vector<double> m(features.pixel_count());
    std::size_t p = 0;
    for (std::uint32_t r = 0; r < features.rows; ++r)
        for (std::uint32_t c = 0; c < features.cols; ++c, ++p)
            m[p] = local_scale(static_cast<int>(r), static_cast<int>(c), features, spec);
    return m;
}

CsrMatrix affinity_weights(const FeatureField& features, const NeighborhoodSpec& spec) {
    spec.validate();
    const int rows = static_cast<int>(features.rows);
    const int cols = static_cast<int>(features.cols);
    const int n = rows * cols;
    const double beta = spec.bandwidth();

    CsrBuilder builder(n);
    int i = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c, ++i) {
            const double* fi = features.feature(i);
            const double m = local_scale(r, c, features, spec);
            for (int j : propagation_neighborhood(r, c, spec, rows, cols)) {
                const double* fj = features.feature(j);
                double w;
                if (m == 0.0) {
                    w = features_equal(fi, fj) ? 1.0 : 0.0;
                } else {
                    const double d_sq = feature_dist_sq(fi, fj);
                    if (d_sq == 0.0) {
                        w = 1.0;
                    } else if (d_sq == m) {
                        w = spec.delta_floor;
                    } else {
                        w = std::exp(-d_sq / (beta * m));
                        // Calibration floor is exact: distances within scale
                        // never fall below delta_floor.
                        if (d_sq < m) w = std::max(w, spec.delta_floor);
                    }
                }
                if (w != 0.0) builder.add(j, w);
            }
            builder.finish_row();
        }
    }
    return builder.take();
}

SparseAffinity symmetrize(const CsrMatrix& w, std::uint32_t rows, std::uint32_t cols) {
    const int n = w.n;
    if (n != static_cast<int>(rows * cols))
        throw dimension_error("kernel size does not match slice dimensions");

    // Transpose pattern, then merge each row with the matching transpose row.
    std::vector<int> t_count(n, 0);
    for (int i = 0; i < n; ++i)
        for (int k = w.row_ptr[i]; k < w.row_ptr[i + 1]; ++k) ++t_count[w.cols[k]];
    std::vector<int> t_ptr(n + 1, 0);
    for (int i = 0; i < n; ++i) t_ptr[i + 1] = t_ptr[i] + t_count[i];
    std::vector<int> t_cols(w.nnz());
    std::vector<double> t_vals(w.nnz());
    std::vector<int> fill(t_ptr.begin(), t_ptr.end() - 1);
    for (int i = 0; i < n; ++i)
        for (int k = w.row_ptr[i]; k < w.row_ptr[i + 1]; ++k) {
            const int j = w.cols[k];
            t_cols[fill[j]] = i;  // ascending since i sweeps in order
            t_vals[fill[j]] = w.vals[k];
            ++fill[j];
        }

    CsrBuilder builder(n);
    for (int i = 0; i < n; ++i) {
        int a = w.row_ptr[i], a_end = w.row_ptr[i + 1];
        int b = t_ptr[i], b_end = t_ptr[i + 1];
        while (a < a_end || b < b_end) {
            int col;
            double wij = 0.0, wji = 0.0;
            if (a < a_end && (b >= b_end || w.cols[a] <= t_cols[b])) col = w.cols[a];
            else col = t_cols[b];
            if (a < a_end && w.cols[a] == col) wij = w.vals[a++];
            if (b < b_end && t_cols[b] == col) wji = t_vals[b++];
            const double v = 0.5 * (wij + wji);
            if (v != 0.0) builder.add(col, v);
        }
        builder.finish_row();
    }

    SparseAffinity out;
    out.rows = rows;
    out.cols = cols;
    out.k = builder.take();
    return out;
}

void write_affinity_triplets(const SparseAffinity& k, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path.string());
    char buf[80];
    for (int i = 0; i < k.k.n; ++i)
        for (int idx = k.k.row_ptr[i]; idx < k.k.row_ptr[i + 1]; ++idx) {
            std::snprintf(buf, sizeof buf, "%d %d %.9g\n", i, k.k.cols[idx], k.k.vals[idx]);
            out << buf;
        }
    if (!out) throw format_error("write failure: " + path.string());
}

}  // namespace seisflat
