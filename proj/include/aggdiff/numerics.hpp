#ifndef AGGDIFF_NUMERICS_HPP
#define AGGDIFF_NUMERICS_HPP

/// @file numerics.hpp
/// Small numerical building blocks shared across the library: compensated
/// summation (fixed, deterministic order), an 8-point Gauss-Legendre rule,
/// and adaptive Simpson quadrature for construction-time verification.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace aggdiff {

/// Neumaier compensated accumulator. Deterministic for a fixed input order.
class CompensatedSum {
public:
    void add(double x) noexcept {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) noexcept {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

namespace detail {

// Abscissae/weights for 8-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 4> kGauss8X = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGauss8W = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace detail

/// 8-point Gauss-Legendre integral of f over [a, b].
template <typename F>
double gauss8(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double dx = half * detail::kGauss8X[static_cast<std::size_t>(i)];
        acc += detail::kGauss8W[static_cast<std::size_t>(i)] * (f(mid - dx) + f(mid + dx));
    }
    return acc * half;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace aggdiff

#endif
