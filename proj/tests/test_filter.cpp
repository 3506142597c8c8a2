#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "seisflat/filter.hpp"

using namespace seisflat;

namespace {

SeismicVolume seeded_volume(std::uint32_t m, std::uint32_t n, std::uint32_t l,
                            std::uint64_t seed) {
    SeismicVolume v;
    v.m = m;
    v.n = n;
    v.l = l;
    v.values.resize(v.pixel_count());
    for (std::size_t i = 0; i < v.values.size(); ++i)
        v.values[i] = static_cast<float>(gaussian_at(seed, i));
    return v;
}

SeismicVolume constant_volume(float c) {
    SeismicVolume v;
    v.m = v.n = v.l = 4;
    v.values.assign(v.pixel_count(), c);
    return v;
}

Cov27 make_cov(const std::vector<std::vector<double>>& columns) {
    PatchMatrix p;
    p.m = static_cast<std::uint32_t>(columns.size());
    p.n = 1;
    p.l = 1;
    for (const auto& col : columns) p.data.insert(p.data.end(), col.begin(), col.end());
    return feature_covariance(p);
}

}  // namespace

TEST_SUITE("filter") {

TEST_CASE("constant volume gives constant patch columns") {
    const PatchMatrix p = extract_patches(constant_volume(2.5f));
    for (std::size_t pix = 0; pix < p.pixel_count(); ++pix)
        for (int k = 0; k < kPatchSize; ++k) CHECK(p.column(pix)[k] == 2.5);
}

TEST_CASE("patch columns match the brute-force cube gather") {
    const SeismicVolume v = seeded_volume(5, 4, 6, 11);
    const PatchMatrix p = extract_patches(v);

    // Interior pixel.
    {
        const auto expect = oracle::gather_cube_clamped(v, 2, 2, 3);
        const double* got = p.column(v.index(2, 2, 3));
        for (int k = 0; k < kPatchSize; ++k) CHECK(got[k] == expect[k]);
    }
    // Corner pixel: replicate padding.
    {
        const auto expect = oracle::gather_cube_clamped(v, 0, 0, 0);
        const double* got = p.column(v.index(0, 0, 0));
        for (int k = 0; k < kPatchSize; ++k) CHECK(got[k] == expect[k]);
    }
    // Far corner.
    {
        const auto expect = oracle::gather_cube_clamped(v, 4, 3, 5);
        const double* got = p.column(v.index(4, 3, 5));
        for (int k = 0; k < kPatchSize; ++k) CHECK(got[k] == expect[k]);
    }
}

TEST_CASE("undersized volume is rejected for patches") {
    CHECK_THROWS_AS((void)extract_patches(seeded_volume(2, 4, 4, 1)), dimension_error);
}

TEST_CASE("covariance of identical columns is zero") {
    const Cov27 c = feature_covariance(extract_patches(constant_volume(1.0f)));
    for (double x : c) CHECK(x == 0.0);
}

TEST_CASE("two-column covariance hand check") {
    std::vector<std::vector<double>> cols(2, std::vector<double>(kPatchSize, 0.0));
    cols[0][0] = 1.0;
    cols[1][0] = -1.0;
    const Cov27 c = make_cov(cols);
    CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-15));
    for (int i = 0; i < kPatchSize; ++i)
        for (int j = 0; j < kPatchSize; ++j)
            if (i != 0 || j != 0) CHECK(c[i * kPatchSize + j] == 0.0);
}

TEST_CASE("covariance matches the dense two-pass oracle") {
    PatchMatrix p;
    p.m = 10;
    p.n = 1;
    p.l = 1;
    p.data.resize(10 * kPatchSize);
    for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] = gaussian_at(77, i);

    const Cov27 c = feature_covariance(p);
    const auto expect = oracle::dense_covariance(p.data, 10);
    for (int i = 0; i < kPatchSize * kPatchSize; ++i)
        CHECK(c[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("covariance requires at least two patches") {
    PatchMatrix p;
    p.m = 1;
    p.n = 1;
    p.l = 1;
    p.data.resize(kPatchSize, 1.0);
    CHECK_THROWS_AS((void)feature_covariance(p), dimension_error);
}

TEST_CASE("principal component of a rank-one covariance") {
    Cov27 c{};
    c[0] = 2.0;
    const Vec27 u = principal_component(c);
    CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k < kPatchSize; ++k) CHECK(std::abs(u[k]) < 1e-10);
}

TEST_CASE("principal component of zero covariance is e1 by convention") {
    const Vec27 u = principal_component(Cov27{});
    CHECK(u[0] == 1.0);
    for (int k = 1; k < kPatchSize; ++k) CHECK(u[k] == 0.0);
}

TEST_CASE("principal component matches the dense eigendecomposition oracle") {
    // Seeded random PSD matrix B^T B.
    std::vector<double> b(kPatchSize * kPatchSize);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = gaussian_at(5150, i);
    Cov27 c{};
    for (int i = 0; i < kPatchSize; ++i)
        for (int j = 0; j < kPatchSize; ++j) {
            double s = 0.0;
            for (int k = 0; k < kPatchSize; ++k)
                s += b[k * kPatchSize + i] * b[k * kPatchSize + j];
            c[i * kPatchSize + j] = s;
        }

    const Vec27 u = principal_component(c);
    std::vector<double> vals, vecs;
    oracle::dense_eigensym(kPatchSize, std::vector<double>(c.begin(), c.end()), vals, vecs);

    double cosang = 0.0, rayleigh = 0.0;
    for (int i = 0; i < kPatchSize; ++i) {
        cosang += u[i] * vecs[i * kPatchSize + (kPatchSize - 1)];
        double s = 0.0;
        for (int j = 0; j < kPatchSize; ++j) s += c[i * kPatchSize + j] * u[j];
        rayleigh += u[i] * s;
    }
    CHECK(std::abs(cosang) >= 1.0 - 1e-10);
    CHECK(std::abs(rayleigh - vals[kPatchSize - 1]) <= 1e-10 * vals[kPatchSize - 1]);
}

TEST_CASE("principal component maximizes the Rayleigh quotient over random probes") {
    const SeismicVolume v = seeded_volume(6, 6, 6, 4242);
    const Cov27 c = feature_covariance(extract_patches(v));
    const Vec27 u = principal_component(c);

    auto quadratic = [&](const double* x) {
        double s = 0.0;
        for (int i = 0; i < kPatchSize; ++i) {
            double row = 0.0;
            for (int j = 0; j < kPatchSize; ++j) row += c[i * kPatchSize + j] * x[j];
            s += x[i] * row;
        }
        return s;
    };

    const double best = quadratic(u.data());
    SplitMix64 rng(99);
    for (int probe = 0; probe < 100; ++probe) {
        Vec27 r{};
        double nrm = 0.0;
        for (int i = 0; i < kPatchSize; ++i) {
            r[i] = rng.next_gauss();
            nrm += r[i] * r[i];
        }
        nrm = std::sqrt(nrm);
        for (double& x : r) x /= nrm;
        CHECK(best >= quadratic(r.data()) - 1e-9);
    }
}

TEST_CASE("filtered values are the u1 dot products") {
    const SeismicVolume v = seeded_volume(5, 5, 5, 8);
    const PatchMatrix p = extract_patches(v);
    Vec27 u{};
    u[0] = 1.0;
    const ScalarField w = filtered_values(p, u);
    // u = e1 picks the first cube entry.
    for (std::size_t pix = 0; pix < p.pixel_count(); ++pix)
        CHECK(w.w[pix] == p.column(pix)[0]);

    // Seeded u1 against a direct dot-product oracle.
    Vec27 u1{};
    double nrm = 0.0;
    for (int i = 0; i < kPatchSize; ++i) {
        u1[i] = gaussian_at(1001, i);
        nrm += u1[i] * u1[i];
    }
    nrm = std::sqrt(nrm);
    for (double& x : u1) x /= nrm;
    const ScalarField w1 = filtered_values(p, u1);
    for (std::size_t pix = 0; pix < p.pixel_count(); ++pix) {
        double expect = 0.0;
        for (int k = 0; k < kPatchSize; ++k) expect += u1[k] * p.column(pix)[k];
        CHECK(w1.w[pix] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("filtered values of constant patches are constant") {
    const PatchMatrix p = extract_patches(constant_volume(3.0f));
    Vec27 u{};
    u[0] = 1.0;
    const ScalarField w = filtered_values(p, u);
    for (double x : w.w) CHECK(x == 3.0);
}

TEST_CASE("linearity of the filtered values in the patches") {
    const SeismicVolume a = seeded_volume(4, 4, 4, 21);
    const SeismicVolume b = seeded_volume(4, 4, 4, 22);
    SeismicVolume mix = a;
    for (std::size_t i = 0; i < mix.values.size(); ++i)
        mix.values[i] = 2.0f * a.values[i] + 3.0f * b.values[i];

    Vec27 u{};
    u[5] = 0.6;
    u[13] = 0.8;
    const ScalarField wa = filtered_values(extract_patches(a), u);
    const ScalarField wb = filtered_values(extract_patches(b), u);
    const ScalarField wm = filtered_values(extract_patches(mix), u);
    for (std::size_t i = 0; i < wm.w.size(); ++i)
        CHECK(wm.w[i] ==
              doctest::Approx(2.0 * wa.w[i] + 3.0 * wb.w[i]).epsilon(1e-6));
}

TEST_CASE("shift covariance: constant offset moves w by c*sum(u1), C unchanged") {
    const SeismicVolume v = seeded_volume(4, 5, 4, 31);
    SeismicVolume shifted = v;
    for (float& x : shifted.values) x += 2.0f;

    const PatchMatrix p = extract_patches(v);
    const PatchMatrix ps = extract_patches(shifted);

    const Cov27 c = feature_covariance(p);
    const Cov27 cs = feature_covariance(ps);
    for (int i = 0; i < kPatchSize * kPatchSize; ++i)
        CHECK(cs[i] == doctest::Approx(c[i]).epsilon(1e-9));

    Vec27 u{};
    double sum_u = 0.0;
    for (int i = 0; i < kPatchSize; ++i) {
        u[i] = gaussian_at(404, i);
        sum_u += u[i];
    }
    const ScalarField w = filtered_values(p, u);
    const ScalarField ws = filtered_values(ps, u);
    for (std::size_t i = 0; i < w.w.size(); ++i)
        CHECK(ws.w[i] == doctest::Approx(w.w[i] + 2.0 * sum_u).epsilon(1e-9));
}

TEST_CASE("filtered features gather the w cube around slice pixels") {
    const SeismicVolume v = seeded_volume(6, 7, 5, 55);
    const PatchMatrix p = extract_patches(v);
    const Cov27 c = feature_covariance(p);
    const Vec27 u1 = principal_component(c);
    const ScalarField w = filtered_values(p, u1);

    const SliceRef slice{SliceAxis::i3, 2};
    const FeatureField ff = filtered_features(w, v, slice);
    REQUIRE(ff.rows == v.m);
    REQUIRE(ff.cols == v.n);

    // Brute-force oracle: clamped 27-gather of w.
    for (std::uint32_t r = 0; r < ff.rows; ++r)
        for (std::uint32_t col = 0; col < ff.cols; ++col) {
            const double* f = ff.feature(r, col);
            int k = 0;
            for (int d1 = -1; d1 <= 1; ++d1)
                for (int d2 = -1; d2 <= 1; ++d2)
                    for (int d3 = -1; d3 <= 1; ++d3, ++k) {
                        auto cl = [](std::int64_t x, std::int64_t hi) {
                            return std::clamp<std::int64_t>(x, 0, hi);
                        };
                        const std::size_t idx = w.index(
                            static_cast<std::uint32_t>(cl(static_cast<std::int64_t>(r) + d1, v.m - 1)),
                            static_cast<std::uint32_t>(cl(static_cast<std::int64_t>(col) + d2, v.n - 1)),
                            static_cast<std::uint32_t>(cl(std::int64_t{2} + d3, v.l - 1)));
                        CHECK(f[k] == w.w[idx]);
                    }
        }
}

TEST_CASE("constant w gives identical features everywhere") {
    const SeismicVolume v = constant_volume(1.5f);
    ScalarField w;
    w.m = v.m;
    w.n = v.n;
    w.l = v.l;
    w.w.assign(v.pixel_count(), 7.0);
    const FeatureField ff = filtered_features(w, v, {SliceAxis::i3, 1});
    for (std::size_t pix = 0; pix < ff.pixel_count(); ++pix)
        for (int k = 0; k < kPatchSize; ++k) CHECK(ff.feature(pix)[k] == 7.0);
}

TEST_CASE("warp-free volume: features equal along depth rows away from edges") {
    SynthSpec spec;
    spec.m = 12;
    spec.n = 10;
    spec.l = 6;
    spec.layers = {{0.11, 1.0}};
    spec.seed = 5;
    const SeismicVolume v = synthesize_volume(spec);
    const PatchMatrix p = extract_patches(v);
    const Vec27 u1 = principal_component(feature_covariance(p));
    const ScalarField w = filtered_values(p, u1);
    const FeatureField ff = filtered_features(w, v, {SliceAxis::i3, 3});

    for (std::uint32_t r = 0; r < ff.rows; ++r) {
        const double* ref = ff.feature(r, 1);
        for (std::uint32_t c = 2; c + 1 < ff.cols; ++c) {
            const double* f = ff.feature(r, c);
            for (int k = 0; k < kPatchSize; ++k)
                CHECK(f[k] == doctest::Approx(ref[k]).epsilon(1e-12));
        }
    }
}

}  // TEST_SUITE
