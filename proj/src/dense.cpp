#include "seisflat/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seisflat/common.hpp"

namespace seisflat::detail {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void fix_sign(std::vector<double>& v) {
    double amax = 0.0;
    for (double x : v) amax = std::max(amax, std::abs(x));
    if (amax == 0.0) return;
    for (double x : v) {
        if (std::abs(x) > 1e-12 * amax) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

void jacobi_eigensym(int n, std::vector<double> a,
                     std::vector<double>& evals, std::vector<double>& evecs) {
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double x = a[static_cast<std::size_t>(p) * n + q];
                s += x * x;
            }
        return std::sqrt(2.0 * s);
    };

    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    const double stop = std::max(1e-300, 1e-15 * scale * n);

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[static_cast<std::size_t>(p) * n + q];
                if (std::abs(apq) <= 1e-300) continue;
                const double app = a[static_cast<std::size_t>(p) * n + p];
                const double aqq = a[static_cast<std::size_t>(q) * n + q];
                const double theta = 0.5 * (aqq - app) / apq;
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                a[static_cast<std::size_t>(p) * n + p] = app - t * apq;
                a[static_cast<std::size_t>(q) * n + q] = aqq + t * apq;
                a[static_cast<std::size_t>(p) * n + q] = 0.0;
                a[static_cast<std::size_t>(q) * n + p] = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    double& arp = a[static_cast<std::size_t>(r) * n + p];
                    double& arq = a[static_cast<std::size_t>(r) * n + q];
                    const double xp = arp, xq = arq;
                    arp = c * xp - s * xq;
                    arq = s * xp + c * xq;
                    a[static_cast<std::size_t>(p) * n + r] = arp;
                    a[static_cast<std::size_t>(q) * n + r] = arq;
                }
                for (int r = 0; r < n; ++r) {
                    double& vrp = v[static_cast<std::size_t>(r) * n + p];
                    double& vrq = v[static_cast<std::size_t>(r) * n + q];
                    const double xp = vrp, xq = vrq;
                    vrp = c * xp - s * xq;
                    vrq = s * xp + c * xq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = a[static_cast<std::size_t>(i) * n + i];
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return diag[x] < diag[y]; });

    evals.resize(n);
    evecs.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        evals[j] = diag[order[j]];
        for (int i = 0; i < n; ++i)
            evecs[static_cast<std::size_t>(i) * n + j] = v[static_cast<std::size_t>(i) * n + order[j]];
    }
}

void orthonormalize(std::vector<std::vector<double>>& block,
                    const std::vector<double>* pinned,
                    unsigned long long refresh_seed) {
    SplitMix64 rng(refresh_seed);
    const std::size_t n = block.empty() ? 0 : block[0].size();
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < block.size(); ++j) {
            auto& col = block[j];
            if (pinned) {
                const double d = dot(col, *pinned);
                for (std::size_t i = 0; i < n; ++i) col[i] -= d * (*pinned)[i];
            }
            for (std::size_t k = 0; k < j; ++k) {
                const double d = dot(col, block[k]);
                for (std::size_t i = 0; i < n; ++i) col[i] -= d * block[k][i];
            }
            double nrm = norm2(col);
            if (nrm < 1e-13) {
                // Column collapsed; replace deterministically and redo its
                // projections.
                for (std::size_t i = 0; i < n; ++i) col[i] = rng.next_gauss();
                if (pinned) {
                    const double d = dot(col, *pinned);
                    for (std::size_t i = 0; i < n; ++i) col[i] -= d * (*pinned)[i];
                }
                for (std::size_t k = 0; k < j; ++k) {
                    const double d = dot(col, block[k]);
                    for (std::size_t i = 0; i < n; ++i) col[i] -= d * block[k][i];
                }
                nrm = norm2(col);
            }
            const double inv = 1.0 / nrm;
            for (std::size_t i = 0; i < n; ++i) col[i] *= inv;
        }
    }
}

}  // namespace seisflat::detail
