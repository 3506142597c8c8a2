#include "seisflat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "seisflat/dense.hpp"

namespace seisflat {

DiffusionOperator row_normalize(SparseAffinity k) {
    DiffusionOperator op;
    op.q.resize(k.k.n);
    for (int i = 0; i < k.k.n; ++i) {
        double s = 0.0;
        for (int idx = k.k.row_ptr[i]; idx < k.k.row_ptr[i + 1]; ++idx) s += k.k.vals[idx];
        if (!(s > 0.0))
            throw validation_error("kernel row " + std::to_string(i) +
                                   " has no positive entry; cannot normalize");
        op.q[i] = s;
    }
    op.affinity = std::move(k);
    return op;
}

CsrMatrix conjugate_symmetric(const DiffusionOperator& op) {
    const CsrMatrix& k = op.affinity.k;
    std::vector<double> sq(op.q.size());
    for (std::size_t i = 0; i < op.q.size(); ++i) sq[i] = std::sqrt(op.q[i]);

    CsrMatrix a = k;
    for (int i = 0; i < k.n; ++i)
        for (int idx = k.row_ptr[i]; idx < k.row_ptr[i + 1]; ++idx)
            a.vals[idx] = k.vals[idx] / (sq[i] * sq[k.cols[idx]]);
    return a;
}

void apply_markov(const DiffusionOperator& op, const std::vector<double>& x,
                  std::vector<double>& y) {
    op.affinity.k.matvec(x, y);
    for (int i = 0; i < op.affinity.k.n; ++i) y[i] /= op.q[i];
}

namespace {

// Power steps applied between Rayleigh-Ritz extractions. The iteration runs
// on (A+I)/2, whose spectrum sits in [0,1] and preserves algebraic order.
constexpr int kInnerSteps = 8;
constexpr int kMaxOuterIterations = 20000;

void apply_shifted(const CsrMatrix& a, std::vector<double>& col, std::vector<double>& tmp) {
    a.matvec(col, tmp);
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = 0.5 * (tmp[i] + col[i]);
}

}  // namespace

TopkResult eigensolve_topk(const CsrMatrix& a, int k, double tol, std::uint64_t seed,
                           const std::vector<double>* stationary) {
    const int n = a.n;
    const int pairs = k + 1;
    if (pairs < 1 || pairs > n)
        throw validation_error("need 1 <= k+1 <= dim, got k+1 = " + std::to_string(pairs) +
                               ", dim = " + std::to_string(n));

    std::vector<double> pinned;
    if (stationary) {
        pinned = *stationary;
        const double nrm = detail::norm2(pinned);
        if (!(nrm > 0.0)) throw validation_error("stationary vector must be nonzero");
        for (double& x : pinned) x /= nrm;
    }
    const int wanted = stationary ? pairs - 1 : pairs;  // iterated Ritz pairs
    const int block = std::min(k + 3 - (stationary ? 1 : 0), stationary ? n - 1 : n);

    TopkResult out;
    if (stationary) {
        std::vector<double> av(n);
        a.matvec(pinned, av);
        out.lambda.push_back(detail::dot(pinned, av));
        out.phi.push_back(pinned);
    }
    if (wanted == 0) return out;

    // Seeded start block.
    std::vector<std::vector<double>> q(block, std::vector<double>(n));
    {
        SplitMix64 rng(seed);
        for (auto& col : q)
            for (double& x : col) x = rng.next_gauss();
    }
    detail::orthonormalize(q, stationary ? &pinned : nullptr, seed ^ 0x5b5b5b5bull);

    std::vector<double> tmp(n);
    std::vector<std::vector<double>> aq(block, std::vector<double>(n));
    std::vector<double> h(static_cast<std::size_t>(block) * block);
    std::vector<double> theta, rot;
    double worst = 0.0;

    for (int outer = 0; outer < kMaxOuterIterations; ++outer) {
        for (auto& col : q)
            for (int s = 0; s < kInnerSteps; ++s) apply_shifted(a, col, tmp);
        detail::orthonormalize(q, stationary ? &pinned : nullptr, seed ^ 0x5b5b5b5bull);

        // Rayleigh-Ritz on A.
        for (int j = 0; j < block; ++j) a.matvec(q[j], aq[j]);
        for (int i = 0; i < block; ++i)
            for (int j = i; j < block; ++j) {
                const double v = detail::dot(q[i], aq[j]);
                h[static_cast<std::size_t>(i) * block + j] = v;
                h[static_cast<std::size_t>(j) * block + i] = v;
            }
        detail::jacobi_eigensym(block, h, theta, rot);

        // Rotate, descending eigenvalue order.
        std::vector<std::vector<double>> q_new(block, std::vector<double>(n, 0.0));
        std::vector<std::vector<double>> aq_new(block, std::vector<double>(n, 0.0));
        for (int j = 0; j < block; ++j) {
            const int src_col = block - 1 - j;  // jacobi sorts ascending
            for (int c = 0; c < block; ++c) {
                const double w = rot[static_cast<std::size_t>(c) * block + src_col];
                if (w == 0.0) continue;
                for (int i = 0; i < n; ++i) {
                    q_new[j][i] += w * q[c][i];
                    aq_new[j][i] += w * aq[c][i];
                }
            }
        }
        q.swap(q_new);
        aq.swap(aq_new);

        worst = 0.0;
        for (int j = 0; j < wanted; ++j) {
            const double lam = theta[block - 1 - j];
            double r = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = aq[j][i] - lam * q[j][i];
                r += d * d;
            }
            worst = std::max(worst, std::sqrt(r));
        }
        if (worst <= tol) {
            for (int j = 0; j < wanted; ++j) {
                out.lambda.push_back(theta[block - 1 - j]);
                detail::fix_sign(q[j]);
                out.phi.push_back(q[j]);
            }
            return out;
        }
    }
    throw numeric_error("eigensolver did not converge after " +
                        std::to_string(kMaxOuterIterations) +
                        " iterations; worst residual " + std::to_string(worst));
}

std::vector<std::vector<double>> recover_diffusion_eigenvectors(
    const DiffusionOperator& op, const std::vector<std::vector<double>>& phi) {
    std::vector<double> inv_sq(op.q.size());
    for (std::size_t i = 0; i < op.q.size(); ++i) inv_sq[i] = 1.0 / std::sqrt(op.q[i]);

    std::vector<std::vector<double>> psi(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) {
        psi[j].resize(phi[j].size());
        for (std::size_t i = 0; i < phi[j].size(); ++i) psi[j][i] = phi[j][i] * inv_sq[i];
    }
    return psi;
}

Spectrum diffusion_spectrum(const DiffusionOperator& op, int k, double tol, std::uint64_t seed) {
    const CsrMatrix a = conjugate_symmetric(op);
    std::vector<double> sq(op.q.size());
    for (std::size_t i = 0; i < op.q.size(); ++i) sq[i] = std::sqrt(op.q[i]);

    TopkResult top = eigensolve_topk(a, k, tol, seed, &sq);
    Spectrum s;
    s.lambda = std::move(top.lambda);
    s.psi = recover_diffusion_eigenvectors(op, top.phi);
    s.phi = std::move(top.phi);
    return s;
}

void write_eigenvector_csv(const Spectrum& s, std::uint32_t rows, std::uint32_t cols,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path.string());
    out << "row,col";
    for (std::size_t j = 1; j < s.psi.size(); ++j) out << ",psi" << j;
    out << "\n";
    char buf[64];
    std::size_t p = 0;
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c, ++p) {
            out << r << "," << c;
            for (std::size_t j = 1; j < s.psi.size(); ++j) {
                std::snprintf(buf, sizeof buf, ",%.9g", s.psi[j][p]);
                out << buf;
            }
            out << "\n";
        }
    }
    if (!out) throw format_error("write failure: " + path.string());
}

}  // namespace seisflat
