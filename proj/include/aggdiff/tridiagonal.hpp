#ifndef AGGDIFF_TRIDIAGONAL_HPP
#define AGGDIFF_TRIDIAGONAL_HPP

/// Thomas algorithm for diagonally dominant tridiagonal systems: O(n), no
/// pivoting. Both matrices used here (backward-Euler diffusion and the
/// screened Laplacian) are strictly diagonally dominant M-matrices.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace aggdiff {

/// Scratch-reusing Thomas solver. lower/upper have length n-1, diag and rhs
/// length n; the solution overwrites rhs.
class TridiagonalSolver {
public:
    void solve(std::span<const double> lower, std::span<const double> diag,
               std::span<const double> upper, std::span<double> rhs) {
        const std::size_t n = diag.size();
        if (n == 0 || lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n)
            throw std::invalid_argument("TridiagonalSolver: inconsistent sizes");
        scratch_.resize(n);
        double pivot = diag[0];
        scratch_[0] = upper.empty() ? 0.0 : upper[0] / pivot;
        rhs[0] /= pivot;
        for (std::size_t i = 1; i < n; ++i) {
            pivot = diag[i] - lower[i - 1] * scratch_[i - 1];
            if (i < n - 1) scratch_[i] = upper[i] / pivot;
            rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / pivot;
        }
        for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch_[i] * rhs[i + 1];
    }

private:
    std::vector<double> scratch_;
};

}  // namespace aggdiff

#endif
