#ifndef AGGDIFF_CONVOLVE_HPP
#define AGGDIFF_CONVOLVE_HPP

/// @file convolve.hpp
/// Nonlocal velocity b = K' * u as a full *linear* (zero-padded, non-circular)
/// discrete convolution truncated to the grid:
///
///     b_i = dx * sum_j samples[i - j] u_j .
///
/// Wrap-around is never allowed to alias: with kernel support 2n-1 and signal
/// length n, the middle n outputs of a length-2n circular convolution are
/// exactly the linear ones, so a transform length >= 2n suffices.

#include <complex>
#include <stdexcept>
#include <vector>

#include "aggdiff/fft.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/kernel.hpp"
#include "aggdiff/numerics.hpp"

namespace aggdiff {

/// Precomputed spectrum of a kernel plus FFT twiddles; reusable across every
/// step of a solver run on the same grid.
class ConvolutionPlan {
public:
    explicit ConvolutionPlan(const Kernel& kernel)
        : grid_(kernel.grid),
          n_fft_(detail::next_power_of_two(2 * static_cast<std::size_t>(kernel.grid.n_cells))),
          fft_(n_fft_),
          kernel_hat_(n_fft_) {
        for (std::size_t s = 0; s < kernel.samples.size(); ++s)
            kernel_hat_[s] = kernel.samples[s];
        fft_.forward(kernel_hat_);
    }

    const Grid& grid() const noexcept { return grid_; }

    /// Apply the convolution to a field sharing the plan's grid.
    Field apply(const Field& u) const {
        if (!(u.grid == grid_)) throw std::invalid_argument("convolve: grid mismatch");
        const int n = grid_.n_cells;
        std::vector<std::complex<double>> work(n_fft_);
        for (int i = 0; i < n; ++i) work[static_cast<std::size_t>(i)] = u[i];
        fft_.forward(work);
        for (std::size_t s = 0; s < n_fft_; ++s) work[s] *= kernel_hat_[s];
        fft_.inverse_unnormalized(work);
        const double scale = grid_.dx / static_cast<double>(n_fft_);
        Field b(grid_, u.time);
        // full convolution index i + (n-1) picks out the on-grid outputs
        for (int i = 0; i < n; ++i)
            b[i] = scale * work[static_cast<std::size_t>(i + n - 1)].real();
        return b;
    }

private:
    Grid grid_;
    std::size_t n_fft_;
    detail::FftPlan fft_;
    std::vector<std::complex<double>> kernel_hat_;
};

/// FFT-based convolution velocity (the fast path).
inline Field convolve(const Kernel& kernel, const Field& u) {
    return ConvolutionPlan(kernel).apply(u);
}

/// Direct O(n^2) summation. Kept as the independent reference the FFT path is
/// tested against; also usable for small grids.
inline Field convolve_direct(const Kernel& kernel, const Field& u) {
    if (!(u.grid == kernel.grid)) throw std::invalid_argument("convolve_direct: grid mismatch");
    const int n = u.grid.n_cells;
    Field b(u.grid, u.time);
    for (int i = 0; i < n; ++i) {
        CompensatedSum s;
        for (int j = 0; j < n; ++j) s.add(kernel.at_offset(i - j) * u[j]);
        b[i] = u.grid.dx * s.value();
    }
    return b;
}

}  // namespace aggdiff

#endif
