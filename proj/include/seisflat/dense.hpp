#pragma once

#include <vector>

namespace seisflat::detail {

// Cyclic Jacobi eigendecomposition of a dense symmetric matrix (row-major).
// Eigenvalues come back ascending; evecs is row-major n x n with eigenvector
// j in column j. Intended for the small Rayleigh-Ritz blocks inside the
// iterative solvers, but correct for any modest n.
void jacobi_eigensym(int n, std::vector<double> a,
                     std::vector<double>& evals, std::vector<double>& evecs);

// Modified Gram-Schmidt (two passes) over `block`, optionally keeping every
// column orthogonal to `pinned`. Columns that collapse are refreshed from a
// deterministic stream derived from `refresh_seed`.
void orthonormalize(std::vector<std::vector<double>>& block,
                    const std::vector<double>* pinned,
                    unsigned long long refresh_seed);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

// Flip sign so the first component with |x| > 1e-12 * max|x| is positive.
void fix_sign(std::vector<double>& v);

}  // namespace seisflat::detail
