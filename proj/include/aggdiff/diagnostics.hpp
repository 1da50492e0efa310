#ifndef AGGDIFF_DIAGNOSTICS_HPP
#define AGGDIFF_DIAGNOSTICS_HPP

/// @file diagnostics.hpp
/// Turns trajectories into the quantities the theory speaks about: L^p norms
/// and their decay exponents, scaled distances to the asymptotic profiles,
/// and the first-moment audit for the initial concentration phenomenon.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aggdiff/errors.hpp"
#include "aggdiff/field_ops.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/kernel.hpp"
#include "aggdiff/profiles.hpp"

namespace aggdiff {

/// Per-output-time scalars. Scaled profile distances are
/// t^{(1-1/p)/2} ||u(t) - profile(t)||_p; they are absent at t = 0 (profiles
/// are singular there) and the wave map is absent when A = 0.
struct DiagnosticsRecord {
    double time = 0.0;
    double mass = 0.0;
    std::map<double, double> norms;  // p -> ||u||_p, p = inf allowed
    double peak = 0.0;               // mean of the two cells adjacent to the x = 0 face
    double first_moment = 0.0;
    std::map<double, double> scaled_heat_distance;
    std::map<double, double> scaled_wave_distance;
    double boundary_mass_fraction = 0.0;
};

inline double scaling_exponent(double p) {
    return std::isinf(p) ? 0.5 : 0.5 * (1.0 - 1.0 / p);
}

/// Assemble a record for a snapshot. `profile_mass` is the conserved mass M
/// the profiles are parameterized by; `total_integral` is A = int K'.
inline DiagnosticsRecord record(const Field& u, double profile_mass, double total_integral,
                                std::span<const double> norm_orders) {
    DiagnosticsRecord r;
    r.time = u.time;
    r.mass = mass(u);
    for (double p : norm_orders) r.norms[p] = lp_norm(u, p);
    const int half = u.size() / 2;
    r.peak = 0.5 * (u[half - 1] + u[half]);
    r.first_moment = first_moment(u);
    const double bmass = u.grid.dx * (u[0] + u[u.size() - 1]);
    r.boundary_mass_fraction = r.mass != 0.0 ? bmass / r.mass : 0.0;

    if (u.time > 0.0) {
        const HeatProfile heat{profile_mass};
        const Field gh = evaluate_heat(heat, u.grid, u.time);
        std::optional<Field> wave;
        if (total_integral != 0.0 && profile_mass != 0.0)
            wave = evaluate_wave(DiffusionWave(profile_mass, total_integral), u.grid, u.time);
        for (double p : norm_orders) {
            const double scale = std::pow(u.time, scaling_exponent(p));
            r.scaled_heat_distance[p] = scale * lp_norm(axpby(1.0, u, -1.0, gh), p);
            if (wave) r.scaled_wave_distance[p] = scale * lp_norm(axpby(1.0, u, -1.0, *wave), p);
        }
    }
    return r;
}

inline DiagnosticsRecord record(const Field& u, double profile_mass, double total_integral) {
    static constexpr double kDefault[] = {1.0, 2.0, std::numeric_limits<double>::infinity()};
    return record(u, profile_mass, total_integral, kDefault);
}

struct DecayFit {
    double slope = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

/// Least-squares slope of log(value) against log(t) over the window.
/// Requires t_lo > 0, at least 5 in-window points, all values positive.
inline DecayFit fit_decay_exponent(std::span<const std::pair<double, double>> series,
                                   double t_lo, double t_hi) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo))
        throw std::invalid_argument("fit_decay_exponent: window requires 0 < t_lo < t_hi");
    std::vector<double> xs, ys;
    for (const auto& [t, v] : series) {
        if (t < t_lo || t > t_hi) continue;
        if (!(v > 0.0))
            throw insufficient_data_error("fit_decay_exponent: nonpositive value in window");
        xs.push_back(std::log(t));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 5)
        throw insufficient_data_error("fit_decay_exponent: fewer than 5 points in window");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    DecayFit fit;
    fit.points = static_cast<int>(xs.size());
    fit.slope = sxy / sxx;
    // constant series: the zero-slope line is an exact fit
    const double ss_res = syy - fit.slope * sxy;
    fit.r_squared = syy > 1e-20 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

struct ConvergenceReport {
    bool eventually_decreasing = false;  // last 3 inter-record differences negative
    double terminal_value = 0.0;
    double reference_value = 0.0;  // value at the first record with t >= 1
    bool converging = false;       // terminal < 0.2 * reference
};

/// Convergence verdict for a scaled-distance series (t, d(t)).
inline ConvergenceReport convergence_report(std::span<const std::pair<double, double>> series) {
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].first >= series[i - 1].first))
            throw std::invalid_argument("convergence_report: series not sorted by time");
    std::vector<std::pair<double, double>> tail;
    for (const auto& e : series)
        if (e.first >= 1.0) tail.push_back(e);
    if (tail.size() < 4)
        throw insufficient_data_error("convergence_report: needs >= 4 entries with t >= 1");

    ConvergenceReport rep;
    rep.reference_value = tail.front().second;
    rep.terminal_value = tail.back().second;
    rep.eventually_decreasing = true;
    for (std::size_t i = tail.size() - 3; i < tail.size(); ++i)
        if (!(tail[i].second - tail[i - 1].second < 0.0)) rep.eventually_decreasing = false;
    rep.converging = rep.terminal_value < 0.2 * rep.reference_value;
    return rep;
}

enum class ProfileKind { heat, wave };

inline ConvergenceReport convergence_report(std::span<const DiagnosticsRecord> records, double p,
                                            ProfileKind kind = ProfileKind::heat) {
    std::vector<std::pair<double, double>> series;
    for (const auto& r : records) {
        const auto& m = kind == ProfileKind::heat ? r.scaled_heat_distance : r.scaled_wave_distance;
        const auto it = m.find(p);
        if (it != m.end()) series.emplace_back(r.time, it->second);
    }
    return convergence_report(series);
}

/// Discrete counterpart of M^{3/2} <= C ||u||_2 I^{1/2}: the first moment of
/// a nonnegative field never falls below M^3 / ((27/2) ||u||_2^2). The
/// constant 27/2 comes from splitting the mass integral at radius R and
/// optimizing; it applies verbatim to the piecewise-constant interpolant, so
/// the discrete quantities satisfy it exactly.
inline double first_moment_lower_bound(double mass_value, double l2_norm) {
    if (l2_norm <= 0.0) return 0.0;
    return mass_value * mass_value * mass_value / (13.5 * l2_norm * l2_norm);
}

/// Parameters of the concentration experiment: the attraction hypothesis
/// sup_{0 < x <= delta} K'(x) <= -gamma, which the audit verifies on the
/// kernel's cell averages before trusting the first-moment bound.
struct ConcentrationSpec {
    double delta = 1.0;
    double gamma = 0.5 * std::exp(-1.0);
};

struct ConcentrationAudit {
    double initial_slope = 0.0;       // first discrete difference of I(t)
    double theoretical_bound = 0.0;   // 2 u(0,0) - (gamma/2) M^2 + (2 gamma/delta) M I(0)
    double t_observed = 0.0;          // largest time with strict decrease of I from t = 0
    bool peak_increased = false;      // peak at t_observed exceeds the initial peak
    bool concentrating = false;       // strict decrease seen on a nonempty initial window
    double initial_first_moment = 0.0;
    double margin = 0.0;              // strictness threshold, 1e-12 * I(0)
};

/// Verify the kernel hypotheses (odd, nonpositive on x > 0, <= -gamma on
/// (0, delta]) on the cell averages, then audit the first-moment trajectory.
inline ConcentrationAudit concentration_audit(std::span<const DiagnosticsRecord> records,
                                              const Kernel& kernel,
                                              const ConcentrationSpec& spec) {
    if (records.size() < 2)
        throw insufficient_data_error("concentration_audit: needs at least two records");
    if (records.front().time != 0.0)
        throw std::invalid_argument("concentration_audit: records must start at t = 0");

    const int m = kernel.offset_count();
    double smax = 0.0;
    for (double s : kernel.samples) smax = std::max(smax, std::abs(s));
    const double tol = 1e-12 * smax;
    for (int j = 1; j <= m; ++j) {
        if (std::abs(kernel.at_offset(j) + kernel.at_offset(-j)) > tol)
            throw precondition_error("concentration_audit: kernel is not odd");
        if (kernel.at_offset(j) > tol)
            throw precondition_error("concentration_audit: kernel not nonpositive for x > 0");
    }
    // cell-average version of the pointwise hypothesis, as documented
    const double dx = kernel.grid.dx;
    bool any_in_range = false;
    for (int j = 1; j <= m; ++j) {
        const double x = static_cast<double>(j) * dx;
        if (x > spec.delta) break;
        any_in_range = true;
        if (!(kernel.at_offset(j) <= -spec.gamma * (1.0 - 1e-12)))
            throw precondition_error(
                "concentration_audit: kernel cell averages exceed -gamma on (0, delta]");
    }
    if (!any_in_range)
        throw precondition_error("concentration_audit: no kernel cells inside (0, delta]");

    const DiagnosticsRecord& r0 = records.front();
    ConcentrationAudit audit;
    audit.initial_first_moment = r0.first_moment;
    audit.margin = 1e-12 * r0.first_moment;
    audit.initial_slope = (records[1].first_moment - r0.first_moment) /
                          (records[1].time - r0.time);
    audit.theoretical_bound = 2.0 * r0.peak - 0.5 * spec.gamma * r0.mass * r0.mass +
                              (2.0 * spec.gamma / spec.delta) * r0.mass * r0.first_moment;

    std::size_t last = 0;
    while (last + 1 < records.size() &&
           records[last + 1].first_moment < records[last].first_moment - audit.margin)
        ++last;
    audit.t_observed = records[last].time;
    audit.concentrating = last > 0;
    audit.peak_increased = records[last].peak > r0.peak;
    return audit;
}

/// Exactness check used by concentration presets: the discretized datum must
/// be even under grid reflection (centers come in exact +/- pairs, so a
/// symmetric formula sampled on them is exactly even).
inline void require_even(const Field& u, double rel_tol = 0.0) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    const int n = u.size();
    for (int i = 0; i < n / 2; ++i)
        if (std::abs(u[i] - u[n - 1 - i]) > rel_tol * m)
            throw precondition_error("initial datum is not even under grid reflection");
}

}  // namespace aggdiff

#endif
