#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "seisflat/common.hpp"

namespace seisflat {

// Reference rectangle [0,w] x [0,h] with a uniform nx x ny cell grid.
struct RectangleSpec {
    double width = 1.0, height = 1.0;
    int nx = 2, ny = 2;

    [[nodiscard]] double area() const { return width * height; }
    [[nodiscard]] int node_count() const { return (nx + 1) * (ny + 1); }
    void validate() const {
        if (!(width > 0.0) || !(height > 0.0))
            throw validation_error("rectangle sides must be positive");
        if (nx < 2 || ny < 2) throw validation_error("grid must be at least 2x2 cells");
    }
};

enum class DeformationFamily { identity, vertical_wave, bulge };

// Closed-form diffeomorphism of the reference rectangle with an analytic
// Jacobian, evaluated pointwise:
//   vertical-wave: (x, y + a sin(pi x/w) sin(pi y/h))
//   bulge:         (x (1 + a sin(pi y/h)), y)
struct Deformation {
    DeformationFamily family = DeformationFamily::identity;
    double amplitude = 0.0;

    void map(const RectangleSpec& rect, double x, double y, double& px, double& py) const;
    // Row-major 2x2: [dpx/dx, dpx/dy, dpy/dx, dpy/dy].
    void jacobian(const RectangleSpec& rect, double x, double y,
                  std::array<double, 4>& j) const;

    [[nodiscard]] const char* name() const;
    [[nodiscard]] static Deformation parse(const std::string& family_name, double amplitude);
};

struct JacobianExtremes {
    double eps = 0.0;    // max singular-value deviation from 1
    double delta = 0.0;  // max |det J - 1|
};

// Sampled suprema over an inclusive (samples+1)^2 grid; closed-form singular
// values of the 2x2 Jacobian. det J <= 0 anywhere is an error.
[[nodiscard]] JacobianExtremes jacobian_extremes(const Deformation& def,
                                                 const RectangleSpec& rect,
                                                 int samples_per_axis);

// Largest amplitude with eps_meas * d <= target, found by bisection.
[[nodiscard]] double amplitude_for_eps_d(DeformationFamily family, const RectangleSpec& rect,
                                         double target_eps_d, int samples_per_axis,
                                         int dimension = 2);

// Closed-form Neumann eigenpair of the rectangle: eta = pi^2 (p^2/w^2 + q^2/h^2)
// with eigenfunction cos(p pi x/w) cos(q pi y/h).
struct AnalyticMode {
    double eta = 0.0;
    int p = 0, q = 0;

    [[nodiscard]] double evaluate(const RectangleSpec& rect, double x, double y) const;
};

// First `count` modes sorted ascending by eta, ties by (q,p) lexicographic.
[[nodiscard]] std::vector<AnalyticMode> analytic_rectangle_spectrum(const RectangleSpec& rect,
                                                                    int count);

// Symmetric stiffness stored as off-diagonal entries; the diagonal is the
// negated row sum, and matvec uses the difference form
//   (S x)_i = sum_j s_ij (x_j - x_i),
// so S annihilates constants exactly, in floating point too.
struct StiffnessMatrix {
    int n = 0;
    std::vector<int> row_ptr;  // size n+1, off-diagonal pattern
    std::vector<int> cols;
    std::vector<double> vals;

    [[nodiscard]] std::vector<double> diagonal() const;
    void matvec(const std::vector<double>& x, std::vector<double>& y) const;
    [[nodiscard]] double entry(int i, int j) const;  // includes implicit diagonal
};

struct AssembledOperator {
    StiffnessMatrix stiffness;
    std::vector<double> mass;  // lumped, diagonal
    int nx = 0, ny = 0;
};

// Bilinear quadrilateral elements, 2x2 Gauss quadrature, natural (Neumann)
// boundary, row-sum lumped mass.
[[nodiscard]] AssembledOperator assemble_reference_operator(const RectangleSpec& rect);

// Same discretization of the pulled-back form with metric
// G = |det J| J^{-1} J^{-T} and weight rho = |det J|: eigenvectors of
// (S_G, M_rho) are the deformed-domain eigenfunctions composed with the map,
// expressed on the reference grid. Identity reduces to the reference operator
// bit for bit.
[[nodiscard]] AssembledOperator assemble_pulled_back_operator(const RectangleSpec& rect,
                                                              const Deformation& def);

struct NeumannSpectrum {
    std::vector<double> eta;                 // ascending, count+1 values
    std::vector<std::vector<double>> modes;  // M-orthonormal
};

// Smallest count+1 eigenpairs of M^{-1/2} S M^{-1/2} mapped back to the
// generalized problem. Shift-inverted block subspace iteration backed by a
// banded Cholesky factorization. Residuals ||S v - eta M v|| <= tol ||M v||.
[[nodiscard]] NeumannSpectrum neumann_eigensolve(const AssembledOperator& op, int count,
                                                 double tol);

// alpha_j = u^T M v_j.
[[nodiscard]] std::vector<double> expansion_coefficients(const std::vector<double>& u,
                                                         const NeumannSpectrum& basis,
                                                         const std::vector<double>& mass);

// rho_k = norm_sq - sum_{j=1..k} alpha_j^2 (the alpha_0^2 + tail form),
// clamped at zero.
[[nodiscard]] double residual_tail(const std::vector<double>& alpha, int k, double norm_sq);

// 20 eta1 eps d / (eta_{k+1} - eta1) + eps d, valid for 0 <= eps d <= 1/10.
[[nodiscard]] double stability_bound(double eta1, double eta_k1, double eps, int dimension);

// Variant for a projection span that includes the constant mode: the eps*d
// term drops.
[[nodiscard]] double stability_bound_mean_included(double eta1, double eta_k1, double eps,
                                                   int dimension);

struct InequalityCheck {
    double lhs = 0.0, rhs = 0.0;
    bool pass = false;
};

// The three intermediate inequalities behind the bound, evaluated with
// measured quantities (1e-8 slack):
//   eigenvalue_upper: eta1 (1+eps)^2 (1-delta)/((1-delta)^3 - (1+delta) delta^2) >= mu1
//   energy_upper:     mu1 (1+delta)/(1-eps)^2 >= sum_j eta_j alpha_j^2
//   mean_mass:        alpha_0^2 <= delta^2 (1+delta)^2 / (1-delta)^2
struct ChainChecks {
    InequalityCheck eigenvalue_upper;
    InequalityCheck energy_upper;
    InequalityCheck mean_mass;
};

[[nodiscard]] ChainChecks chain_inequality_checks(const NeumannSpectrum& reference,
                                                  const NeumannSpectrum& deformed,
                                                  const std::vector<double>& alpha,
                                                  double eps, double delta);

struct StabilityReport {
    std::string family;
    double amplitude = 0.0;
    double eps = 0.0, delta = 0.0;
    int dimension = 2, k = 0;
    double eta1 = 0.0, eta_k1 = 0.0, mu1 = 0.0;
    double residual = 0.0, bound = 0.0, allowance = 0.0;
    bool skipped = false;  // out of hypothesis (eps*d > 1/10)
    bool pass = false;
    bool lemma1_pass = false, lemma2_pass = false, lemma3_pass = false;
    std::vector<double> alpha;
};

struct VerifyOptions {
    std::vector<int> ks;
    int jacobian_samples = 64;
    double eig_tol = 1e-9;
};

// One report per (deformation, k): measured projection residual against the
// bound plus ten times the two-grid eta1 discretization estimate, and the
// chain inequalities. k values at a reference-spectrum degeneracy are
// rejected.
[[nodiscard]] std::vector<StabilityReport> verify_stability_bound(
    const RectangleSpec& rect, const std::vector<Deformation>& catalog,
    const VerifyOptions& options);

void write_report_csv(const std::vector<StabilityReport>& reports,
                      const std::filesystem::path& path);

}  // namespace seisflat
