#ifndef AGGDIFF_KERNEL_HPP
#define AGGDIFF_KERNEL_HPP

/// @file kernel.hpp
/// Discretization of aggregation kernels K' in L^1. Samples are cell
/// *integrals* divided by dx (cell averages), not point values: this keeps
/// the total integral A and the L^1 norm quadrature-exact for the closed-form
/// variants and represents the kink of e^{-|x|}/2 at 0 correctly.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "aggdiff/grid.hpp"
#include "aggdiff/numerics.hpp"

namespace aggdiff {

/// K(x) = e^{-|x|}/2, K'(x) = -sign(x) e^{-|x|}/2 (parabolic-elliptic
/// chemotaxis interaction).
struct ChemotaxisKernel {};

/// K'(x) = a exp(-x^2 / (2 sigma^2)); even, A = a sigma sqrt(2 pi).
struct GaussianMollifierKernel {
    double amplitude = 1.0;
    double width = 1.0;  // sigma
};

/// K'(x) = a x exp(-x^2 / (2 sigma^2)); odd, A = 0.
struct OddGaussianKernel {
    double amplitude = 1.0;
    double width = 1.0;
};

/// K' == 0 (pure heat mode).
struct ZeroKernel {};

/// K' given as a strictly increasing table of (x, K'(x)) points, linearly
/// interpolated and zero outside the tabulated range.
struct TabulatedKernel {
    std::vector<double> x;
    std::vector<double> value;
};

using KernelSpec =
    std::variant<ChemotaxisKernel, GaussianMollifierKernel, OddGaussianKernel, ZeroKernel,
                 TabulatedKernel>;

/// Discretized kernel: samples[j + n - 1] is the cell average of K' over the
/// cell offset by j*dx, for j in [-(n-1), n-1].
struct Kernel {
    Grid grid;
    std::vector<double> samples;
    double total_integral = 0.0;  // A
    double l1_norm = 0.0;

    int offset_count() const noexcept { return grid.n_cells - 1; }
    double at_offset(int j) const { return samples[static_cast<std::size_t>(j + offset_count())]; }
};

namespace detail {

// Fill totals with the symmetric pairing order (j, -j): for antisymmetric
// sample sets each pair adds exactly zero, so A == 0 bitwise.
inline void finalize_kernel(Kernel& k) {
    const int m = k.offset_count();
    CompensatedSum a;
    CompensatedSum l1;
    a.add(k.at_offset(0));
    l1.add(std::abs(k.at_offset(0)));
    for (int j = 1; j <= m; ++j) {
        a.add(k.at_offset(j) + k.at_offset(-j));
        l1.add(std::abs(k.at_offset(j)));
        l1.add(std::abs(k.at_offset(-j)));
    }
    k.total_integral = k.grid.dx * a.value();
    k.l1_norm = k.grid.dx * l1.value();
}

// Cell integrals from an antiderivative; used by the closed-form variants.
template <typename Antiderivative>
void fill_from_antiderivative(Kernel& k, Antiderivative&& F) {
    const int m = k.offset_count();
    const double dx = k.grid.dx;
    for (int j = -m; j <= m; ++j) {
        const double a = (static_cast<double>(j) - 0.5) * dx;
        const double b = (static_cast<double>(j) + 0.5) * dx;
        k.samples[static_cast<std::size_t>(j + m)] = (F(b) - F(a)) / dx;
    }
}

// Odd kernels: compute the positive offsets and mirror with exact negation;
// the j = 0 cell integral of an odd function vanishes identically.
template <typename Antiderivative>
void fill_odd_from_antiderivative(Kernel& k, Antiderivative&& F) {
    const int m = k.offset_count();
    const double dx = k.grid.dx;
    k.samples[static_cast<std::size_t>(m)] = 0.0;
    for (int j = 1; j <= m; ++j) {
        const double a = (static_cast<double>(j) - 0.5) * dx;
        const double b = (static_cast<double>(j) + 0.5) * dx;
        const double s = (F(b) - F(a)) / dx;
        k.samples[static_cast<std::size_t>(m + j)] = s;
        k.samples[static_cast<std::size_t>(m - j)] = -s;
    }
}

inline double tabulated_value(const TabulatedKernel& t, double x) {
    if (t.x.empty() || x <= t.x.front() || x >= t.x.back()) {
        if (!t.x.empty() && x == t.x.front()) return t.value.front();
        if (!t.x.empty() && x == t.x.back()) return t.value.back();
        return 0.0;
    }
    const auto it = std::lower_bound(t.x.begin(), t.x.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - t.x.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - t.x[lo]) / (t.x[hi] - t.x[lo]);
    return (1.0 - w) * t.value[lo] + w * t.value[hi];
}

}  // namespace detail

inline Kernel sample_kernel(const KernelSpec& spec, const Grid& grid) {
    Kernel k;
    k.grid = grid;
    k.samples.assign(static_cast<std::size_t>(2 * grid.n_cells - 1), 0.0);

    if (std::holds_alternative<ZeroKernel>(spec)) {
        // all zero
    } else if (std::holds_alternative<ChemotaxisKernel>(spec)) {
        // antiderivative of -sign(x) e^{-|x|}/2 is e^{-|x|}/2 itself
        detail::fill_odd_from_antiderivative(
            k, [](double x) { return 0.5 * std::exp(-std::abs(x)); });
    } else if (const auto* g = std::get_if<GaussianMollifierKernel>(&spec)) {
        if (!(g->width > 0.0))
            throw std::invalid_argument("sample_kernel: Gaussian width must be positive");
        const double c = g->amplitude * g->width * std::sqrt(std::numbers::pi / 2.0);
        const double inv = 1.0 / (g->width * std::numbers::sqrt2);
        detail::fill_from_antiderivative(k, [=](double x) { return c * std::erf(x * inv); });
    } else if (const auto* og = std::get_if<OddGaussianKernel>(&spec)) {
        if (!(og->width > 0.0))
            throw std::invalid_argument("sample_kernel: Gaussian width must be positive");
        const double s2 = og->width * og->width;
        detail::fill_odd_from_antiderivative(
            k, [=](double x) { return -og->amplitude * s2 * std::exp(-0.5 * x * x / s2); });
    } else if (const auto* tab = std::get_if<TabulatedKernel>(&spec)) {
        if (tab->x.size() != tab->value.size() || tab->x.size() < 2)
            throw std::invalid_argument("sample_kernel: tabulated kernel needs >= 2 points");
        for (std::size_t i = 0; i < tab->x.size(); ++i) {
            if (!std::isfinite(tab->x[i]) || !std::isfinite(tab->value[i]))
                throw std::invalid_argument("sample_kernel: tabulated kernel has non-finite data");
            if (i > 0 && !(tab->x[i] > tab->x[i - 1]))
                throw std::invalid_argument(
                    "sample_kernel: tabulated abscissae must be strictly increasing");
        }
        // integrate the interpolant cell by cell, splitting at table knots so
        // the Gauss rule never straddles a kink
        const int m = k.offset_count();
        const double dx = grid.dx;
        for (int j = -m; j <= m; ++j) {
            const double a = (static_cast<double>(j) - 0.5) * dx;
            const double b = (static_cast<double>(j) + 0.5) * dx;
            CompensatedSum cell;
            double seg_lo = a;
            for (double knot : tab->x) {
                if (knot <= seg_lo) continue;
                if (knot >= b) break;
                cell.add(gauss8([&](double x) { return detail::tabulated_value(*tab, x); },
                                seg_lo, knot));
                seg_lo = knot;
            }
            cell.add(gauss8([&](double x) { return detail::tabulated_value(*tab, x); }, seg_lo, b));
            k.samples[static_cast<std::size_t>(j + m)] = cell.value() / dx;
        }
    }

    detail::finalize_kernel(k);
    if (!std::isfinite(k.l1_norm))
        throw std::invalid_argument("sample_kernel: kernel is not integrable on the grid");
    return k;
}

/// Cell averages of the chemotaxis *potential* K(x) = e^{-|x|}/2 (the
/// fundamental solution of -d^2/dx^2 + 1). Used to compare v = K * u with
/// the tridiagonal elliptic solve.
inline Kernel chemotaxis_potential_kernel(const Grid& grid) {
    Kernel k;
    k.grid = grid;
    k.samples.assign(static_cast<std::size_t>(2 * grid.n_cells - 1), 0.0);
    // antiderivative of e^{-|x|}/2 is sign(x)(1 - e^{-|x|})/2, continuous at 0
    detail::fill_from_antiderivative(k, [](double x) {
        const double s = x < 0.0 ? -1.0 : 1.0;
        return 0.5 * s * (1.0 - std::exp(-std::abs(x)));
    });
    detail::finalize_kernel(k);
    return k;
}

/// Parse a tabulated kernel from two-column whitespace-separated text
/// (`x  K'(x)`, strictly increasing x, '#' comments allowed).
inline TabulatedKernel load_kernel_table(std::istream& in) {
    TabulatedKernel t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, v;
        if (!(ls >> x)) continue;  // blank line
        if (!(ls >> v))
            throw std::invalid_argument("kernel table line " + std::to_string(lineno) +
                                        ": expected two columns");
        t.x.push_back(x);
        t.value.push_back(v);
    }
    return t;
}

inline TabulatedKernel load_kernel_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open kernel table: " + path);
    return load_kernel_table(in);
}

}  // namespace aggdiff

#endif
