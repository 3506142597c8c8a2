#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "seisflat/kernel.hpp"
#include "seisflat/sparse.hpp"

namespace seisflat {

// Row-normalized diffusion operator. P(i,j) = K(i,j)/q(i) is implicit; the
// symmetric conjugate A(i,j) = K(i,j)/sqrt(q(i)q(j)) shares K's pattern.
struct DiffusionOperator {
    SparseAffinity affinity;
    std::vector<double> q;  // row sums of K
};

[[nodiscard]] DiffusionOperator row_normalize(SparseAffinity k);

[[nodiscard]] CsrMatrix conjugate_symmetric(const DiffusionOperator& op);

// y = P x
void apply_markov(const DiffusionOperator& op, const std::vector<double>& x,
                  std::vector<double>& y);

struct TopkResult {
    std::vector<double> lambda;             // descending, k+1 values
    std::vector<std::vector<double>> phi;   // orthonormal eigenvectors of A
};

// k+1 algebraically largest eigenpairs of a symmetric A with ||A||_2 <= 1.
// Block subspace iteration (block k+3) with full reorthogonalization and
// Rayleigh-Ritz on A; iteration runs on (A+I)/2 so the dominant subspace is
// the algebraically largest one. If `stationary` is given it is taken as the
// exact top eigenvector (the diffusion conjugate has sqrt(q)) and the rest of
// the block is deflated against it. Residuals ||A phi - lambda phi|| <= tol.
[[nodiscard]] TopkResult eigensolve_topk(const CsrMatrix& a, int k, double tol,
                                         std::uint64_t seed,
                                         const std::vector<double>* stationary = nullptr);

// psi_j = Q^{-1/2} phi_j, the eigenvectors of P.
[[nodiscard]] std::vector<std::vector<double>> recover_diffusion_eigenvectors(
    const DiffusionOperator& op, const std::vector<std::vector<double>>& phi);

struct Spectrum {
    std::vector<double> lambda;
    std::vector<std::vector<double>> phi;
    std::vector<std::vector<double>> psi;
};

// Convenience: conjugate, solve with the sqrt(q) stationary mode pinned,
// recover diffusion eigenvectors.
[[nodiscard]] Spectrum diffusion_spectrum(const DiffusionOperator& op, int k, double tol,
                                          std::uint64_t seed);

// CSV "row,col,psi1,...,psiM" over the slice grid (psi_0 omitted).
void write_eigenvector_csv(const Spectrum& s, std::uint32_t rows, std::uint32_t cols,
                           const std::filesystem::path& path);

}  // namespace seisflat
