#include "seisflat/flatten.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace seisflat {

std::vector<double> orient_first_eigenvector(std::vector<double> psi1, std::uint32_t rows,
                                             std::uint32_t cols) {
    if (psi1.size() != static_cast<std::size_t>(rows) * cols)
        throw dimension_error("eigenvector length does not match slice dimensions");

    const auto [lo, hi] = std::minmax_element(psi1.begin(), psi1.end());
    const double spread = *hi - *lo;
    const double scale = std::max(std::abs(*hi), std::abs(*lo));
    if (spread <= 1e-12 * std::max(scale, 1e-300))
        throw degenerate_error("degenerate spectrum: first eigenvector is constant");

    const std::uint32_t quarter = std::max<std::uint32_t>(1, rows / 4);
    double top = 0.0, bottom = 0.0;
    for (std::uint32_t r = 0; r < quarter; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) {
            top += psi1[static_cast<std::size_t>(r) * cols + c];
            bottom += psi1[static_cast<std::size_t>(rows - 1 - r) * cols + c];
        }
    if (top < bottom)
        for (double& x : psi1) x = -x;
    return psi1;
}

DepthMap depth_from_eigenvector(const std::vector<double>& psi1, std::uint32_t rows,
                                std::uint32_t cols) {
    if (psi1.size() != static_cast<std::size_t>(rows) * cols)
        throw dimension_error("eigenvector length does not match slice dimensions");
    const auto [lo_it, hi_it] = std::minmax_element(psi1.begin(), psi1.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw degenerate_error("degenerate eigenvector: max equals min");

    DepthMap d;
    d.rows = rows;
    d.cols = cols;
    d.h.resize(psi1.size());
    const double inv_span = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < psi1.size(); ++i) {
        const double t = std::clamp(2.0 * (psi1[i] - lo) * inv_span - 1.0, -1.0, 1.0);
        d.h[i] = std::acos(t);
    }
    return d;
}

FlattenedCloud reparameterize(const Image& slice, const DepthMap& depth) {
    if (slice.rows != depth.rows || slice.cols != depth.cols)
        throw dimension_error("slice and depth map dimensions differ");

    FlattenedCloud cloud;
    cloud.rows = slice.rows;
    cloud.cols = slice.cols;
    cloud.records.reserve(slice.values.size());
    std::size_t p = 0;
    for (std::uint32_t r = 0; r < slice.rows; ++r)
        for (std::uint32_t c = 0; c < slice.cols; ++c, ++p)
            cloud.records.push_back({static_cast<double>(c), depth.h[p],
                                     static_cast<double>(slice.values[p])});
    return cloud;
}

namespace {

void export_csv(const FlattenedCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path.string());
    out << "x,h,value\n";
    char buf[96];
    for (const auto& rec : cloud.records) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", rec.x, rec.h, rec.value);
        out << buf;
    }
    if (!out) throw format_error("write failure: " + path.string());
}

void export_pgm(const FlattenedCloud& cloud, const std::filesystem::path& path) {
    const std::uint32_t rows = cloud.rows, cols = cloud.cols;
    std::vector<double> sum(static_cast<std::size_t>(rows) * cols, 0.0);
    std::vector<int> count(sum.size(), 0);
    for (const auto& rec : cloud.records) {
        const long r = std::lround(rec.h / std::numbers::pi * (rows - 1));
        const auto rr = static_cast<std::uint32_t>(std::clamp(r, 0L, static_cast<long>(rows - 1)));
        const auto cc = static_cast<std::uint32_t>(
            std::clamp(std::lround(rec.x), 0L, static_cast<long>(cols - 1)));
        const std::size_t idx = static_cast<std::size_t>(rr) * cols + cc;
        sum[idx] += rec.value;
        ++count[idx];
    }

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        if (count[i] == 0) continue;
        const double v = sum[i] / count[i];
        if (!any) {
            lo = hi = v;
            any = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    std::vector<std::uint8_t> bytes(sum.size(), 128);
    if (any && hi > lo) {
        const double inv_span = 1.0 / (hi - lo);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            if (count[i] == 0) continue;
            const double t = (sum[i] / count[i] - lo) * inv_span;
            bytes[i] = static_cast<std::uint8_t>(std::clamp(std::lround(t * 255.0), 0L, 255L));
        }
    }
    detail::write_pgm_bytes(path, cols, rows, bytes);
}

}  // namespace

void export_cloud(const FlattenedCloud& cloud, const std::filesystem::path& path,
                  CloudFormat format) {
    if (cloud.rows == 0 || cloud.cols == 0) throw dimension_error("cannot export empty cloud");
    if (format == CloudFormat::csv)
        export_csv(cloud, path);
    else
        export_pgm(cloud, path);
}

}  // namespace seisflat
