#ifndef AGGDIFF_FFT_HPP
#define AGGDIFF_FFT_HPP

/// @file fft.hpp
/// Minimal iterative radix-2 complex FFT for zero-padded linear convolutions
/// of power-of-two length. A plan precomputes the twiddle table once (each
/// entry from std::polar, no error-accumulating recurrences), so repeated
/// transforms of the same length are cheap and bitwise reproducible.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace aggdiff::detail {

inline bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (!is_power_of_two(n)) throw std::invalid_argument("FftPlan: size must be a power of 2");
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
            twiddle_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                              static_cast<double>(n));
    }

    std::size_t size() const noexcept { return n_; }

    void forward(std::vector<std::complex<double>>& a) const { transform(a, false); }

    /// Conjugate transform without the 1/N normalization.
    void inverse_unnormalized(std::vector<std::complex<double>>& a) const { transform(a, true); }

private:
    void transform(std::vector<std::complex<double>>& a, bool inverse) const {
        if (a.size() != n_) throw std::invalid_argument("FftPlan: size mismatch");
        // bit-reversal permutation
        for (std::size_t i = 1, j = 0; i < n_; ++i) {
            std::size_t bit = n_ >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t stride = n_ / len;
            for (std::size_t i = 0; i < n_; i += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    std::complex<double> w = twiddle_[k * stride];
                    if (inverse) w = std::conj(w);
                    const std::complex<double> even = a[i + k];
                    const std::complex<double> odd = a[i + k + len / 2] * w;
                    a[i + k] = even + odd;
                    a[i + k + len / 2] = even - odd;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::complex<double>> twiddle_;
};

}  // namespace aggdiff::detail

#endif
