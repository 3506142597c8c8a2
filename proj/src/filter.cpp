#include "seisflat/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "seisflat/dense.hpp"

namespace seisflat {

namespace {

std::uint32_t clampi(std::int64_t x, std::uint32_t extent) {
    if (x < 0) return 0;
    if (x >= static_cast<std::int64_t>(extent)) return extent - 1;
    return static_cast<std::uint32_t>(x);
}

// Gather the 3x3x3 cube around (i1,i2,i3) from any (m,n,l)-indexed field,
// replicate-padded. Raster order: depth offset slowest, third axis fastest.
template <typename At>
void gather_cube(At&& at, std::uint32_t m, std::uint32_t n, std::uint32_t l,
                 std::uint32_t i1, std::uint32_t i2, std::uint32_t i3, double* out) {
    int k = 0;
    for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2)
            for (int d3 = -1; d3 <= 1; ++d3, ++k)
                out[k] = at(clampi(static_cast<std::int64_t>(i1) + d1, m),
                            clampi(static_cast<std::int64_t>(i2) + d2, n),
                            clampi(static_cast<std::int64_t>(i3) + d3, l));
}

}  // namespace

PatchMatrix extract_patches(const SeismicVolume& v) {
    if (v.m < 3 || v.n < 3 || v.l < 3)
        throw dimension_error("patch extraction requires dims >= 3x3x3");

    PatchMatrix p;
    p.m = v.m;
    p.n = v.n;
    p.l = v.l;
    p.data.resize(p.pixel_count() * kPatchSize);

    auto at = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        return static_cast<double>(v.at(a, b, c));
    };
    std::size_t pix = 0;
    for (std::uint32_t i1 = 0; i1 < v.m; ++i1)
        for (std::uint32_t i2 = 0; i2 < v.n; ++i2)
            for (std::uint32_t i3 = 0; i3 < v.l; ++i3, ++pix)
                gather_cube(at, v.m, v.n, v.l, i1, i2, i3, p.data.data() + pix * kPatchSize);
    return p;
}

Cov27 feature_covariance(const PatchMatrix& p) {
    const std::size_t count = p.pixel_count();
    if (count < 2) throw dimension_error("covariance requires at least 2 patches");

    // Two-pass: mean, then centered outer products in fixed pixel order.
    Vec27 mean{};
    for (std::size_t pix = 0; pix < count; ++pix) {
        const double* g = p.column(pix);
        for (int k = 0; k < kPatchSize; ++k) mean[k] += g[k];
    }
    for (int k = 0; k < kPatchSize; ++k) mean[k] /= static_cast<double>(count);

    Cov27 c{};
    Vec27 centered{};
    for (std::size_t pix = 0; pix < count; ++pix) {
        const double* g = p.column(pix);
        for (int k = 0; k < kPatchSize; ++k) centered[k] = g[k] - mean[k];
        for (int i = 0; i < kPatchSize; ++i) {
            const double ci = centered[i];
            for (int j = i; j < kPatchSize; ++j) c[i * kPatchSize + j] += ci * centered[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(count - 1);
    for (int i = 0; i < kPatchSize; ++i)
        for (int j = i; j < kPatchSize; ++j) {
            const double val = c[i * kPatchSize + j] * inv;
            c[i * kPatchSize + j] = val;
            c[j * kPatchSize + i] = val;
        }
    return c;
}

Vec27 principal_component(const Cov27& c) {
    bool all_zero = true;
    for (double x : c)
        if (x != 0.0) {
            all_zero = false;
            break;
        }
    Vec27 u{};
    if (all_zero) {
        u[0] = 1.0;
        return u;
    }

    SplitMix64 rng(0x50Cau);  // fixed start-vector stream
    auto seed_vector = [&](Vec27& v) {
        double nrm = 0.0;
        do {
            nrm = 0.0;
            for (int i = 0; i < kPatchSize; ++i) {
                v[i] = rng.next_gauss();
                nrm += v[i] * v[i];
            }
        } while (nrm == 0.0);
        nrm = std::sqrt(nrm);
        for (double& x : v) x /= nrm;
    };
    seed_vector(u);

    constexpr int max_iters = 10000;
    constexpr double angle_tol = 1e-12;
    Vec27 next{};
    for (int it = 0; it < max_iters; ++it) {
        double nrm = 0.0;
        for (int i = 0; i < kPatchSize; ++i) {
            double s = 0.0;
            for (int j = 0; j < kPatchSize; ++j) s += c[i * kPatchSize + j] * u[j];
            next[i] = s;
            nrm += s * s;
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) {
            // Start vector landed in the null space; reseed.
            seed_vector(u);
            continue;
        }
        double cosang = 0.0;
        for (int i = 0; i < kPatchSize; ++i) {
            next[i] /= nrm;
            cosang += next[i] * u[i];
        }
        u = next;
        if (1.0 - std::abs(cosang) <= angle_tol) break;
    }

    // First nonzero component positive.
    double amax = 0.0;
    for (double x : u) amax = std::max(amax, std::abs(x));
    for (double x : u) {
        if (std::abs(x) > 1e-12 * amax) {
            if (x < 0.0)
                for (double& y : u) y = -y;
            break;
        }
    }
    return u;
}

ScalarField filtered_values(const PatchMatrix& p, const Vec27& u1) {
    ScalarField w;
    w.m = p.m;
    w.n = p.n;
    w.l = p.l;
    w.w.resize(p.pixel_count());
    for (std::size_t pix = 0; pix < w.w.size(); ++pix) {
        const double* g = p.column(pix);
        double s = 0.0;
        for (int k = 0; k < kPatchSize; ++k) s += u1[k] * g[k];
        w.w[pix] = s;
    }
    return w;
}

FeatureField filtered_features(const ScalarField& w, const SeismicVolume& v, SliceRef s) {
    const std::uint32_t fixed_extent = s.axis == SliceAxis::i2 ? v.n : v.l;
    if (s.index >= fixed_extent)
        throw dimension_error("slice index " + std::to_string(s.index) +
                              " out of range (extent " + std::to_string(fixed_extent) + ")");
    if (w.m != v.m || w.n != v.n || w.l != v.l)
        throw dimension_error("filtered field does not match volume dimensions");

    FeatureField ff;
    ff.rows = v.m;
    ff.cols = detail::slice_width(v, s);
    ff.f.resize(ff.pixel_count() * kPatchSize);

    auto at = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        return w.w[w.index(a, b, c)];
    };
    std::size_t pix = 0;
    for (std::uint32_t r = 0; r < ff.rows; ++r) {
        for (std::uint32_t c = 0; c < ff.cols; ++c, ++pix) {
            std::uint32_t i1, i2, i3;
            detail::slice_coords(v, s, r, c, i1, i2, i3);
            gather_cube(at, v.m, v.n, v.l, i1, i2, i3, ff.f.data() + pix * kPatchSize);
        }
    }
    return ff;
}

void write_w_csv(const ScalarField& w, const SeismicVolume& v, SliceRef s,
                 const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path.string());
    out << "row,col,value\n";
    char buf[64];
    const std::uint32_t width = detail::slice_width(v, s);
    for (std::uint32_t r = 0; r < v.m; ++r) {
        for (std::uint32_t c = 0; c < width; ++c) {
            std::uint32_t i1, i2, i3;
            detail::slice_coords(v, s, r, c, i1, i2, i3);
            std::snprintf(buf, sizeof buf, "%u,%u,%.9g\n", r, c, w.w[w.index(i1, i2, i3)]);
            out << buf;
        }
    }
    if (!out) throw format_error("write failure: " + path.string());
}

}  // namespace seisflat
