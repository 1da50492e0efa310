#ifndef AGGDIFF_FIELD_OPS_HPP
#define AGGDIFF_FIELD_OPS_HPP

/// @file field_ops.hpp
/// Quadrature-level operations on fields. Everything uses the cell-average
/// (midpoint) rule, consistent with the finite-volume representation, and a
/// fixed compensated summation order so results are reproducible bitwise.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aggdiff/grid.hpp"
#include "aggdiff/numerics.hpp"

namespace aggdiff {

/// Total integral dx * sum(u).
inline double mass(const Field& u) {
    CompensatedSum s;
    for (double v : u.values) s.add(v);
    return u.grid.dx * s.value();
}

/// Discrete L^p norm: (dx * sum |u|^p)^(1/p) for finite p, max|u| for p = inf.
inline double lp_norm(const Field& u, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : u.values) m = std::max(m, std::abs(v));
        return m;
    }
    CompensatedSum s;
    if (p == 1.0) {
        for (double v : u.values) s.add(std::abs(v));
        return u.grid.dx * s.value();
    }
    if (p == 2.0) {
        for (double v : u.values) s.add(v * v);
        return std::sqrt(u.grid.dx * s.value());
    }
    for (double v : u.values) s.add(std::pow(std::abs(v), p));
    return std::pow(u.grid.dx * s.value(), 1.0 / p);
}

/// First absolute moment I = dx * sum |x_i| u_i.
inline double first_moment(const Field& u) {
    CompensatedSum s;
    for (int i = 0; i < u.size(); ++i) s.add(std::abs(u.grid.center(i)) * u[i]);
    return u.grid.dx * s.value();
}

namespace detail {

/// Piecewise-linear interpolation of cell values at position x.
/// Between the outermost centers and the domain faces the value tapers
/// linearly to 0 at the face; outside [-L, L] it is 0. Monotone between
/// knots, so nonnegative data stays nonnegative.
inline double interp_linear(const Field& u, double x) {
    const Grid& g = u.grid;
    const int n = g.n_cells;
    if (std::abs(x) >= g.half_width) return 0.0;
    const double pos = (x + g.half_width) / g.dx - 0.5;  // fractional cell index
    if (pos <= 0.0) {
        // between left face and first center: taper from 0 at the face
        return u[0] * (x + g.half_width) / (0.5 * g.dx);
    }
    if (pos >= static_cast<double>(n - 1)) {
        return u[n - 1] * (g.half_width - x) / (0.5 * g.dx);
    }
    const int j = static_cast<int>(pos);
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * u[j] + w * u[j + 1];
}

}  // namespace detail

/// Parabolic rescaling: returns lambda * u(lambda x) sampled on `target`,
/// with time stamp u.time / lambda^2. A snapshot of u at time lambda^2 t
/// therefore rescales to the member u_lambda of the scaling family at time t.
inline Field rescale(const Field& u, double lambda, const Grid& target) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale: lambda must be positive");
    Field out(target, u.time / (lambda * lambda));
    for (int i = 0; i < target.n_cells; ++i)
        out[i] = lambda * detail::interp_linear(u, lambda * target.center(i));
    return out;
}

inline Field rescale(const Field& u, double lambda) { return rescale(u, lambda, u.grid); }

/// a*u + b*w on a shared grid (time stamp taken from u).
inline Field axpby(double a, const Field& u, double b, const Field& w) {
    if (!(u.grid == w.grid)) throw std::invalid_argument("axpby: grid mismatch");
    Field out(u.grid, u.time);
    for (int i = 0; i < u.size(); ++i) out[i] = a * u[i] + b * w[i];
    return out;
}

/// max_i |u_i - w_i|.
inline double max_abs_diff(const Field& u, const Field& w) {
    if (!(u.grid == w.grid)) throw std::invalid_argument("max_abs_diff: grid mismatch");
    double m = 0.0;
    for (int i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - w[i]));
    return m;
}

}  // namespace aggdiff

#endif
