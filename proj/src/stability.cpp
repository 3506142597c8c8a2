#include "seisflat/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "seisflat/dense.hpp"

namespace seisflat {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// Deformations
// ---------------------------------------------------------------------------

void Deformation::map(const RectangleSpec& rect, double x, double y, double& px,
                      double& py) const {
    switch (family) {
        case DeformationFamily::identity:
            px = x;
            py = y;
            return;
        case DeformationFamily::vertical_wave:
            px = x;
            py = y + amplitude * std::sin(pi * x / rect.width) * std::sin(pi * y / rect.height);
            return;
        case DeformationFamily::bulge:
            px = x * (1.0 + amplitude * std::sin(pi * y / rect.height));
            py = y;
            return;
    }
    throw validation_error("unknown deformation family");
}

void Deformation::jacobian(const RectangleSpec& rect, double x, double y,
                           std::array<double, 4>& j) const {
    switch (family) {
        case DeformationFamily::identity:
            j = {1.0, 0.0, 0.0, 1.0};
            return;
        case DeformationFamily::vertical_wave: {
            const double sx = std::sin(pi * x / rect.width);
            const double cx = std::cos(pi * x / rect.width);
            const double sy = std::sin(pi * y / rect.height);
            const double cy = std::cos(pi * y / rect.height);
            j = {1.0, 0.0, amplitude * (pi / rect.width) * cx * sy,
                 1.0 + amplitude * (pi / rect.height) * sx * cy};
            return;
        }
        case DeformationFamily::bulge: {
            const double sy = std::sin(pi * y / rect.height);
            const double cy = std::cos(pi * y / rect.height);
            j = {1.0 + amplitude * sy, x * amplitude * (pi / rect.height) * cy, 0.0, 1.0};
            return;
        }
    }
    throw validation_error("unknown deformation family");
}

const char* Deformation::name() const {
    switch (family) {
        case DeformationFamily::identity: return "identity";
        case DeformationFamily::vertical_wave: return "vertical-wave";
        case DeformationFamily::bulge: return "bulge";
    }
    return "?";
}

Deformation Deformation::parse(const std::string& family_name, double amplitude) {
    Deformation d;
    d.amplitude = amplitude;
    if (family_name == "identity") {
        d.family = DeformationFamily::identity;
        d.amplitude = 0.0;
    } else if (family_name == "vertical-wave") {
        d.family = DeformationFamily::vertical_wave;
    } else if (family_name == "bulge") {
        d.family = DeformationFamily::bulge;
    } else {
        throw validation_error("unknown deformation family: " + family_name);
    }
    return d;
}

namespace {

// Singular values of a 2x2 matrix [a b; c d], closed form.
void singular_values_2x2(const std::array<double, 4>& j, double& smax, double& smin) {
    const double e = 0.5 * (j[0] + j[3]);
    const double f = 0.5 * (j[0] - j[3]);
    const double g = 0.5 * (j[2] + j[1]);
    const double h = 0.5 * (j[2] - j[1]);
    const double q1 = std::sqrt(e * e + h * h);
    const double q2 = std::sqrt(f * f + g * g);
    smax = q1 + q2;
    smin = std::abs(q1 - q2);
}

}  // namespace

JacobianExtremes jacobian_extremes(const Deformation& def, const RectangleSpec& rect,
                                   int samples_per_axis) {
    rect.validate();
    if (samples_per_axis < 32)
        throw validation_error("jacobian sampling requires >= 32 samples per axis");

    JacobianExtremes ex;
    std::array<double, 4> j;
    for (int iy = 0; iy <= samples_per_axis; ++iy) {
        const double y = rect.height * iy / samples_per_axis;
        for (int ix = 0; ix <= samples_per_axis; ++ix) {
            const double x = rect.width * ix / samples_per_axis;
            def.jacobian(rect, x, y, j);
            const double det = j[0] * j[3] - j[1] * j[2];
            if (!(det > 0.0))
                throw deformation_error(std::string("deformation '") + def.name() +
                                        "' has nonpositive Jacobian determinant at (" +
                                        std::to_string(x) + ", " + std::to_string(y) + ")");
            double smax, smin;
            singular_values_2x2(j, smax, smin);
            ex.eps = std::max({ex.eps, smax - 1.0, 1.0 - smin});
            ex.delta = std::max(ex.delta, std::abs(det - 1.0));
        }
    }
    return ex;
}

double amplitude_for_eps_d(DeformationFamily family, const RectangleSpec& rect,
                           double target_eps_d, int samples_per_axis, int dimension) {
    if (family == DeformationFamily::identity) return 0.0;
    if (!(target_eps_d > 0.0)) throw validation_error("target eps*d must be positive");

    auto eps_d_at = [&](double a) -> double {
        Deformation d{family, a};
        try {
            return jacobian_extremes(d, rect, samples_per_axis).eps * dimension;
        } catch (const deformation_error&) {
            return std::numeric_limits<double>::infinity();  // folded map: far past target
        }
    };

    // Bracket, then bisect; keep the in-target side.
    double lo = 0.0, hi = 1e-4;
    while (eps_d_at(hi) < target_eps_d) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw numeric_error("amplitude search failed to bracket the target");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eps_d_at(mid) <= target_eps_d)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double AnalyticMode::evaluate(const RectangleSpec& rect, double x, double y) const {
    return std::cos(p * pi * x / rect.width) * std::cos(q * pi * y / rect.height);
}

std::vector<AnalyticMode> analytic_rectangle_spectrum(const RectangleSpec& rect, int count) {
    rect.validate();
    if (count < 1) throw validation_error("mode count must be >= 1");

    // The count smallest values of pi^2 (p^2/w^2 + q^2/h^2) use p <= count and
    // q <= count * h/w (the (count,0) mode already dominates count+1 modes).
    const auto p_max = static_cast<int>(count);
    const auto q_max = static_cast<int>(std::ceil(count * rect.height / rect.width)) + 1;

    std::vector<AnalyticMode> modes;
    modes.reserve(static_cast<std::size_t>(p_max + 1) * (q_max + 1));
    for (int p = 0; p <= p_max; ++p)
        for (int q = 0; q <= q_max; ++q) {
            const double eta = pi * pi * (static_cast<double>(p) * p / (rect.width * rect.width) +
                                          static_cast<double>(q) * q / (rect.height * rect.height));
            modes.push_back({eta, p, q});
        }
    std::stable_sort(modes.begin(), modes.end(), [](const AnalyticMode& a, const AnalyticMode& b) {
        if (a.eta != b.eta) return a.eta < b.eta;
        if (a.q != b.q) return a.q < b.q;
        return a.p < b.p;
    });
    modes.resize(count);
    return modes;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

std::vector<double> StiffnessMatrix::diagonal() const {
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k];
        d[i] = -s;
    }
    return d;
}

void StiffnessMatrix::matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        const double xi = x[i];
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * (x[cols[k]] - xi);
        y[i] = s;
    }
}

double StiffnessMatrix::entry(int i, int j) const {
    if (i == j) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k];
        return -s;
    }
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (cols[k] == j) return vals[k];
    return 0.0;
}

namespace {

struct MetricSample {
    std::array<double, 3> g;  // SPD 2x2: gxx, gxy, gyy
    double rho;
};

MetricSample metric_at(const Deformation& def, const RectangleSpec& rect, double x, double y) {
    if (def.family == DeformationFamily::identity) return {{1.0, 0.0, 1.0}, 1.0};
    std::array<double, 4> j;
    def.jacobian(rect, x, y, j);
    const double det = j[0] * j[3] - j[1] * j[2];
    if (!(det > 0.0))
        throw deformation_error(std::string("deformation '") + def.name() +
                                "' has nonpositive Jacobian determinant at quadrature point (" +
                                std::to_string(x) + ", " + std::to_string(y) + ")");
    // G = det * J^{-1} J^{-T} = (1/det) [[b^2+d^2, -(ab+cd)], [-(ab+cd), a^2+c^2]]
    const double a = j[0], b = j[1], c = j[2], d = j[3];
    return {{(b * b + d * d) / det, -(a * b + c * d) / det, (a * a + c * c) / det}, det};
}

AssembledOperator assemble(const RectangleSpec& rect, const Deformation& def) {
    rect.validate();
    const int nx = rect.nx, ny = rect.ny;
    const double hx = rect.width / nx, hy = rect.height / ny;
    const int nodes_x = nx + 1;
    const int n = rect.node_count();

    // Accumulate off-diagonal stiffness entries per node into fixed-offset
    // slots; the 8 possible neighbors of a node give a deterministic order.
    static constexpr int kOffsets[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                           {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
    std::vector<std::array<double, 8>> acc(n, std::array<double, 8>{});
    std::vector<double> mass(n, 0.0);

    const double g = 1.0 / std::sqrt(3.0);
    const double gauss[2] = {-g, g};
    const double wq = hx * hy / 4.0;

    for (int ey = 0; ey < ny; ++ey) {
        for (int ex = 0; ex < nx; ++ex) {
            const double x0 = ex * hx, y0 = ey * hy;
            const int nid[4] = {ey * nodes_x + ex, ey * nodes_x + ex + 1,
                                (ey + 1) * nodes_x + ex, (ey + 1) * nodes_x + ex + 1};
            // Local node offsets within the element, matching nid order.
            static constexpr int lx[4] = {0, 1, 0, 1};
            static constexpr int ly[4] = {0, 0, 1, 1};

            double ke[4][4] = {};
            double lump[4] = {};
            for (double gy : gauss) {
                for (double gx : gauss) {
                    const double xq = x0 + (gx + 1.0) * 0.5 * hx;
                    const double yq = y0 + (gy + 1.0) * 0.5 * hy;
                    const MetricSample ms = metric_at(def, rect, xq, yq);

                    double nv[4], dndx[4], dndy[4];
                    for (int i = 0; i < 4; ++i) {
                        const double sx = lx[i] == 0 ? -1.0 : 1.0;
                        const double sy = ly[i] == 0 ? -1.0 : 1.0;
                        nv[i] = 0.25 * (1.0 + sx * gx) * (1.0 + sy * gy);
                        dndx[i] = 0.25 * sx * (1.0 + sy * gy) * 2.0 / hx;
                        dndy[i] = 0.25 * sy * (1.0 + sx * gx) * 2.0 / hy;
                    }
                    for (int i = 0; i < 4; ++i) {
                        const double gxi = ms.g[0] * dndx[i] + ms.g[1] * dndy[i];
                        const double gyi = ms.g[1] * dndx[i] + ms.g[2] * dndy[i];
                        for (int jn = i; jn < 4; ++jn)
                            ke[i][jn] += wq * (gxi * dndx[jn] + gyi * dndy[jn]);
                        lump[i] += wq * ms.rho * nv[i];
                    }
                }
            }

            for (int i = 0; i < 4; ++i) {
                mass[nid[i]] += lump[i];
                for (int jn = i + 1; jn < 4; ++jn) {
                    const int dx = lx[jn] - lx[i], dy = ly[jn] - ly[i];
                    for (int o = 0; o < 8; ++o)
                        if (kOffsets[o][0] == dx && kOffsets[o][1] == dy) {
                            acc[nid[i]][o] += ke[i][jn];
                            break;
                        }
                    for (int o = 0; o < 8; ++o)
                        if (kOffsets[o][0] == -dx && kOffsets[o][1] == -dy) {
                            acc[nid[jn]][o] += ke[i][jn];
                            break;
                        }
                }
            }
        }
    }

    AssembledOperator op;
    op.nx = nx;
    op.ny = ny;
    op.mass = std::move(mass);
    op.stiffness.n = n;
    op.stiffness.row_ptr.reserve(n + 1);
    op.stiffness.row_ptr.push_back(0);
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix <= nx; ++ix) {
            const int i = iy * nodes_x + ix;
            // Neighbor order by ascending node index: offsets sorted by (dy,dx).
            for (const auto& off : kOffsets) {
                const int jx = ix + off[0], jy = iy + off[1];
                if (jx < 0 || jx > nx || jy < 0 || jy > ny) continue;
                int slot = 0;
                for (; slot < 8; ++slot)
                    if (kOffsets[slot][0] == off[0] && kOffsets[slot][1] == off[1]) break;
                const double v = acc[i][slot];
                op.stiffness.cols.push_back(jy * nodes_x + jx);
                op.stiffness.vals.push_back(v);
            }
            op.stiffness.row_ptr.push_back(static_cast<int>(op.stiffness.cols.size()));
        }
    }
    return op;
}

}  // namespace

AssembledOperator assemble_reference_operator(const RectangleSpec& rect) {
    return assemble(rect, Deformation{});
}

AssembledOperator assemble_pulled_back_operator(const RectangleSpec& rect,
                                                const Deformation& def) {
    return assemble(rect, def);
}

// ---------------------------------------------------------------------------
// Banded Cholesky and the generalized eigensolver
// ---------------------------------------------------------------------------

namespace {

// Lower-band Cholesky: band(i, d) holds L(i, i-d), d = 0..bw.
class BandedCholesky {
public:
    BandedCholesky(int n, int bw) : n_(n), bw_(bw), band_(static_cast<std::size_t>(n) * (bw + 1)) {}

    double& at(int i, int d) { return band_[static_cast<std::size_t>(i) * (bw_ + 1) + d]; }
    [[nodiscard]] double at(int i, int d) const {
        return band_[static_cast<std::size_t>(i) * (bw_ + 1) + d];
    }

    void factor() {
        for (int i = 0; i < n_; ++i) {
            const int j0 = std::max(0, i - bw_);
            for (int j = j0; j <= i; ++j) {
                double s = at(i, i - j);
                const int k0 = std::max(j0, j - bw_);
                for (int k = k0; k < j; ++k) s -= at(i, i - k) * at(j, j - k);
                if (j < i) {
                    at(i, i - j) = s / at(j, 0);
                } else {
                    if (!(s > 0.0))
                        throw numeric_error("banded Cholesky hit a nonpositive pivot at row " +
                                            std::to_string(i));
                    at(i, 0) = std::sqrt(s);
                }
            }
        }
    }

    void solve(std::vector<double>& x) const {
        for (int i = 0; i < n_; ++i) {
            double s = x[i];
            const int k0 = std::max(0, i - bw_);
            for (int k = k0; k < i; ++k) s -= at(i, i - k) * x[k];
            x[i] = s / at(i, 0);
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = x[i];
            const int k1 = std::min(n_ - 1, i + bw_);
            for (int k = i + 1; k <= k1; ++k) s -= at(k, k - i) * x[k];
            x[i] = s / at(i, 0);
        }
    }

private:
    int n_, bw_;
    std::vector<double> band_;
};

}  // namespace

NeumannSpectrum neumann_eigensolve(const AssembledOperator& op, int count, double tol) {
    const int n = op.stiffness.n;
    const int pairs = count + 1;
    if (pairs < 1 || pairs > n)
        throw validation_error("need 1 <= count+1 <= node count");
    for (double m : op.mass)
        if (!(m > 0.0)) throw validation_error("lumped mass must be positive");

    // Work on B = M^{-1/2} S M^{-1/2}; shift-invert with a banded factor of
    // B + sigma I, Ritz values taken on B itself.
    std::vector<double> dinv(n);
    for (int i = 0; i < n; ++i) dinv[i] = 1.0 / std::sqrt(op.mass[i]);

    const std::vector<double> sdiag = op.stiffness.diagonal();
    double gersh = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = sdiag[i] * dinv[i] * dinv[i];
        for (int k = op.stiffness.row_ptr[i]; k < op.stiffness.row_ptr[i + 1]; ++k)
            row += std::abs(op.stiffness.vals[k]) * dinv[i] * dinv[op.stiffness.cols[k]];
        gersh = std::max(gersh, row);
    }
    const double sigma = std::max(1e-6 * gersh, 1e-300);

    const int bw = op.nx + 2;
    BandedCholesky chol(n, bw);
    for (int i = 0; i < n; ++i) {
        chol.at(i, 0) = sdiag[i] * dinv[i] * dinv[i] + sigma;
        for (int k = op.stiffness.row_ptr[i]; k < op.stiffness.row_ptr[i + 1]; ++k) {
            const int j = op.stiffness.cols[k];
            if (j < i) chol.at(i, i - j) = op.stiffness.vals[k] * dinv[i] * dinv[j];
        }
    }
    chol.factor();

    auto apply_b = [&](const std::vector<double>& x, std::vector<double>& y,
                       std::vector<double>& scratch) {
        scratch.resize(n);
        for (int i = 0; i < n; ++i) scratch[i] = dinv[i] * x[i];
        op.stiffness.matvec(scratch, y);
        for (int i = 0; i < n; ++i) y[i] *= dinv[i];
    };

    const int block = std::min(pairs + 4, n);
    std::vector<std::vector<double>> q(block, std::vector<double>(n));
    {
        SplitMix64 rng(0x6e756d616e6eull);
        for (auto& col : q)
            for (double& x : col) x = rng.next_gauss();
    }
    detail::orthonormalize(q, nullptr, 0x6e756d616e6eull);

    std::vector<std::vector<double>> bq(block, std::vector<double>(n));
    std::vector<double> scratch(n), h(static_cast<std::size_t>(block) * block);
    std::vector<double> theta, rot, sv(n), mv(n), resid(n);
    double worst = 0.0;

    constexpr int kMaxIterations = 20000;
    for (int outer = 0; outer < kMaxIterations; ++outer) {
        for (auto& col : q) chol.solve(col);
        detail::orthonormalize(q, nullptr, 0x6e756d616e6eull);

        for (int j = 0; j < block; ++j) apply_b(q[j], bq[j], scratch);
        for (int i = 0; i < block; ++i)
            for (int j = i; j < block; ++j) {
                const double v = detail::dot(q[i], bq[j]);
                h[static_cast<std::size_t>(i) * block + j] = v;
                h[static_cast<std::size_t>(j) * block + i] = v;
            }
        detail::jacobi_eigensym(block, h, theta, rot);  // ascending: smallest first

        std::vector<std::vector<double>> q_new(block, std::vector<double>(n, 0.0));
        for (int j = 0; j < block; ++j)
            for (int c = 0; c < block; ++c) {
                const double w = rot[static_cast<std::size_t>(c) * block + j];
                if (w == 0.0) continue;
                for (int i = 0; i < n; ++i) q_new[j][i] += w * q[c][i];
            }
        q.swap(q_new);

        // Contract-form residuals on the generalized problem.
        worst = 0.0;
        bool ok = true;
        for (int j = 0; j < pairs && ok; ++j) {
            for (int i = 0; i < n; ++i) resid[i] = dinv[i] * q[j][i];  // v = M^{-1/2} y
            op.stiffness.matvec(resid, sv);
            double mv_norm = 0.0, r_norm = 0.0;
            for (int i = 0; i < n; ++i) {
                mv[i] = op.mass[i] * resid[i];
                const double d = sv[i] - theta[j] * mv[i];
                r_norm += d * d;
                mv_norm += mv[i] * mv[i];
            }
            r_norm = std::sqrt(r_norm);
            mv_norm = std::sqrt(mv_norm);
            worst = std::max(worst, r_norm / mv_norm);
            if (r_norm > tol * mv_norm) ok = false;
        }
        if (ok) {
            NeumannSpectrum spec;
            spec.eta.reserve(pairs);
            spec.modes.reserve(pairs);
            for (int j = 0; j < pairs; ++j) {
                spec.eta.push_back(theta[j]);
                std::vector<double> v(n);
                for (int i = 0; i < n; ++i) v[i] = dinv[i] * q[j][i];
                detail::fix_sign(v);
                spec.modes.push_back(std::move(v));
            }
            return spec;
        }
    }
    throw numeric_error("generalized eigensolver did not converge; worst residual " +
                        std::to_string(worst));
}

// ---------------------------------------------------------------------------
// Bound machinery
// ---------------------------------------------------------------------------

std::vector<double> expansion_coefficients(const std::vector<double>& u,
                                           const NeumannSpectrum& basis,
                                           const std::vector<double>& mass) {
    if (u.size() != mass.size())
        throw dimension_error("vector and mass dimensions differ");
    std::vector<double> alpha(basis.modes.size());
    for (std::size_t j = 0; j < basis.modes.size(); ++j) {
        if (basis.modes[j].size() != u.size())
            throw dimension_error("basis mode dimension mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * mass[i] * basis.modes[j][i];
        alpha[j] = s;
    }
    return alpha;
}

double residual_tail(const std::vector<double>& alpha, int k, double norm_sq) {
    if (k < 1) throw validation_error("residual tail requires k >= 1");
    if (static_cast<std::size_t>(k) >= alpha.size())
        throw validation_error("not enough coefficients for k = " + std::to_string(k));
    double captured = 0.0;
    for (int j = 1; j <= k; ++j) captured += alpha[j] * alpha[j];
    return std::max(0.0, norm_sq - captured);
}

double stability_bound_mean_included(double eta1, double eta_k1, double eps, int dimension) {
    if (!(eta_k1 > eta1)) throw validation_error("require eta_{k+1} > eta_1");
    if (eps < 0.0) throw validation_error("eps must be >= 0");
    const double eps_d = eps * dimension;
    if (eps_d > 0.1)
        throw hypothesis_error("eps*d = " + std::to_string(eps_d) +
                               " exceeds 1/10; bound not claimed");
    return 20.0 * eta1 * eps_d / (eta_k1 - eta1);
}

double stability_bound(double eta1, double eta_k1, double eps, int dimension) {
    return stability_bound_mean_included(eta1, eta_k1, eps, dimension) + eps * dimension;
}

ChainChecks chain_inequality_checks(const NeumannSpectrum& reference,
                                    const NeumannSpectrum& deformed,
                                    const std::vector<double>& alpha, double eps, double delta) {
    if (deformed.eta.size() < 2 || reference.eta.size() < 2)
        throw validation_error("need at least the first nontrivial eigenvalue on both domains");
    const double denom = std::pow(1.0 - delta, 3) - (1.0 + delta) * delta * delta;
    if (!(denom > 0.0))
        throw hypothesis_error("determinant deviation too large: (1-d)^3 - (1+d)d^2 <= 0");

    constexpr double slack = 1e-8;
    const double eta1 = reference.eta[1];
    const double mu1 = deformed.eta[1];

    ChainChecks checks;
    checks.eigenvalue_upper.lhs =
        eta1 * (1.0 + eps) * (1.0 + eps) * (1.0 - delta) / denom;
    checks.eigenvalue_upper.rhs = mu1;
    checks.eigenvalue_upper.pass = checks.eigenvalue_upper.lhs >= checks.eigenvalue_upper.rhs - slack;

    // Energy sum truncated at the available basis size; the truncation only
    // lowers the right-hand side.
    double energy = 0.0;
    const std::size_t terms = std::min(alpha.size(), reference.eta.size());
    for (std::size_t j = 1; j < terms; ++j) energy += reference.eta[j] * alpha[j] * alpha[j];
    checks.energy_upper.lhs = mu1 * (1.0 + delta) / ((1.0 - eps) * (1.0 - eps));
    checks.energy_upper.rhs = energy;
    checks.energy_upper.pass = checks.energy_upper.lhs >= checks.energy_upper.rhs - slack;

    checks.mean_mass.lhs = alpha.empty() ? 0.0 : alpha[0] * alpha[0];
    checks.mean_mass.rhs =
        delta * delta * (1.0 + delta) * (1.0 + delta) / ((1.0 - delta) * (1.0 - delta));
    checks.mean_mass.pass = checks.mean_mass.lhs <= checks.mean_mass.rhs + slack;
    return checks;
}

std::vector<StabilityReport> verify_stability_bound(const RectangleSpec& rect,
                                                    const std::vector<Deformation>& catalog,
                                                    const VerifyOptions& options) {
    rect.validate();
    if (options.ks.empty()) throw validation_error("no k values given");
    const int dimension = 2;
    int max_k = 0;
    for (int k : options.ks) {
        if (k < 1) throw validation_error("k values must be >= 1");
        max_k = std::max(max_k, k);
    }

    const AssembledOperator ref_op = assemble_reference_operator(rect);
    const NeumannSpectrum ref = neumann_eigensolve(ref_op, max_k + 1, options.eig_tol);

    // Reject k at a reference degeneracy: the bound needs a clean gap.
    for (int k : options.ks)
        if (ref.eta[k + 1] - ref.eta[k] < 1e-6 * ref.eta[1])
            throw validation_error("k = " + std::to_string(k) +
                                   " sits at a degenerate reference eigenvalue; choose k below "
                                   "the first degeneracy");

    // Two-grid eta_1 estimate for the discretization allowance.
    RectangleSpec half = rect;
    half.nx = std::max(2, rect.nx / 2);
    half.ny = std::max(2, rect.ny / 2);
    const NeumannSpectrum ref_half =
        neumann_eigensolve(assemble_reference_operator(half), 1, options.eig_tol);
    const double allowance = 10.0 * std::abs(ref.eta[1] - ref_half.eta[1]);

    std::vector<StabilityReport> reports;
    for (const Deformation& def : catalog) {
        const JacobianExtremes ex = jacobian_extremes(def, rect, options.jacobian_samples);
        const double eps_d = ex.eps * dimension;

        if (eps_d > 0.1) {
            for (int k : options.ks) {
                StabilityReport rep;
                rep.family = def.name();
                rep.amplitude = def.amplitude;
                rep.eps = ex.eps;
                rep.delta = ex.delta;
                rep.dimension = dimension;
                rep.k = k;
                rep.skipped = true;
                reports.push_back(std::move(rep));
            }
            continue;
        }

        const AssembledOperator def_op = assemble_pulled_back_operator(rect, def);
        const NeumannSpectrum deformed = neumann_eigensolve(def_op, 1, options.eig_tol);
        const std::vector<double>& u = deformed.modes[1];

        const std::vector<double> alpha = expansion_coefficients(u, ref, ref_op.mass);
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) norm_sq += u[i] * ref_op.mass[i] * u[i];

        const ChainChecks chain = chain_inequality_checks(ref, deformed, alpha, ex.eps, ex.delta);

        for (int k : options.ks) {
            StabilityReport rep;
            rep.family = def.name();
            rep.amplitude = def.amplitude;
            rep.eps = ex.eps;
            rep.delta = ex.delta;
            rep.dimension = dimension;
            rep.k = k;
            rep.eta1 = ref.eta[1];
            rep.eta_k1 = ref.eta[k + 1];
            rep.mu1 = deformed.eta[1];
            rep.alpha = alpha;
            rep.residual = residual_tail(alpha, k, norm_sq);
            rep.bound = stability_bound(ref.eta[1], ref.eta[k + 1], ex.eps, dimension);
            rep.allowance = allowance;
            rep.pass = rep.residual <= rep.bound + allowance;
            rep.lemma1_pass = chain.eigenvalue_upper.pass;
            rep.lemma2_pass = chain.energy_upper.pass;
            rep.lemma3_pass = chain.mean_mass.pass;
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

void write_report_csv(const std::vector<StabilityReport>& reports,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path.string());
    out << "family,amplitude,eps_meas,delta_meas,d,k,eta1,eta_k1,mu1,residual,bound,pass,"
           "lemma1_pass,lemma2_pass,lemma3_pass\n";
    char buf[400];
    for (const auto& r : reports) {
        if (r.skipped) {
            std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g,%d,%d,,,,,,skip,skip,skip,skip\n",
                          r.family.c_str(), r.amplitude, r.eps, r.delta, r.dimension, r.k);
        } else {
            std::snprintf(buf, sizeof buf,
                          "%s,%.9g,%.9g,%.9g,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%s,%s,%s,%s\n",
                          r.family.c_str(), r.amplitude, r.eps, r.delta, r.dimension, r.k,
                          r.eta1, r.eta_k1, r.mu1, r.residual, r.bound,
                          r.pass ? "pass" : "fail", r.lemma1_pass ? "pass" : "fail",
                          r.lemma2_pass ? "pass" : "fail", r.lemma3_pass ? "pass" : "fail");
        }
        out << buf;
    }
    if (!out) throw format_error("write failure: " + path.string());
}

}  // namespace seisflat
