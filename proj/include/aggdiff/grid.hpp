#ifndef AGGDIFF_GRID_HPP
#define AGGDIFF_GRID_HPP

/// @file grid.hpp
/// Uniform cell-centered grids on a truncated line [-L, L] and the fields
/// (cell-averaged densities / velocities) that live on them.

#include <cmath>
#include <numbers>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "aggdiff/errors.hpp"

namespace aggdiff {

/// Uniform cell-centered partition of [-L, L] with an even number of cells,
/// so that x = 0 lies on a cell face and centers come in exact +/- pairs.
struct Grid {
    double half_width = 0.0;  // L
    int n_cells = 0;
    double dx = 0.0;

    /// Center of cell i, computed symmetrically: (2i + 1 - n)/2 * dx.
    /// Guarantees center(n-1-i) == -center(i) bitwise.
    double center(int i) const noexcept {
        return (static_cast<double>(2 * i + 1 - n_cells) * 0.5) * dx;
    }

    /// Face between cell i-1 and cell i (i in [0, n_cells]).
    double face(int i) const noexcept {
        return (static_cast<double>(i) - static_cast<double>(n_cells) * 0.5) * dx;
    }

    bool operator==(const Grid& other) const noexcept {
        return n_cells == other.n_cells && half_width == other.half_width;
    }
};

inline Grid make_grid(double half_width, int n_cells) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("make_grid: half_width must be positive");
    if (n_cells < 4 || n_cells % 2 != 0)
        throw std::invalid_argument("make_grid: n_cells must be even and >= 4");
    Grid g;
    g.half_width = half_width;
    g.n_cells = n_cells;
    g.dx = 2.0 * half_width / static_cast<double>(n_cells);
    return g;
}

/// Cell-averaged scalar field with a time stamp.
struct Field {
    Grid grid;
    std::vector<double> values;
    double time = 0.0;

    Field() = default;
    explicit Field(const Grid& g, double t = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.n_cells), 0.0), time(t) {}

    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    int size() const noexcept { return grid.n_cells; }

    bool all_finite() const noexcept {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Sample f at cell centers.
template <typename F>
Field sample_field(const Grid& grid, F&& f, double time = 0.0) {
    Field u(grid, time);
    for (int i = 0; i < grid.n_cells; ++i) u[i] = f(grid.center(i));
    return u;
}

/// Gaussian bump of mass M, standard deviation sigma, centered at `center`.
inline Field gaussian_field(const Grid& grid, double mass, double sigma, double center = 0.0,
                            double time = 0.0) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_field: sigma must be positive");
    const double amp = mass / (sigma * std::sqrt(2.0 * std::numbers::pi));
    return sample_field(
        grid,
        [=](double x) {
            const double z = (x - center) / sigma;
            return amp * std::exp(-0.5 * z * z);
        },
        time);
}

/// Compactly supported cosine bump of mass M on [-width, width]:
/// u(x) = (M / width) * cos^2(pi x / (2 width)).
inline Field cosine_bump_field(const Grid& grid, double mass, double width, double time = 0.0) {
    if (!(width > 0.0)) throw std::invalid_argument("cosine_bump_field: width must be positive");
    return sample_field(
        grid,
        [=](double x) {
            if (std::abs(x) >= width) return 0.0;
            const double c = std::cos(0.5 * std::numbers::pi * x / width);
            return (mass / width) * c * c;
        },
        time);
}

/// Concentration-family datum u_{0,P}(x) = P^3 u0(P x) for a base bump u0.
template <typename F>
Field scaled_bump_field(const Grid& grid, double scale_p, F&& base, double time = 0.0) {
    if (!(scale_p > 0.0)) throw std::invalid_argument("scaled_bump_field: P must be positive");
    const double p3 = scale_p * scale_p * scale_p;
    return sample_field(
        grid, [&](double x) { return p3 * base(scale_p * x); }, time);
}

}  // namespace aggdiff

#endif
