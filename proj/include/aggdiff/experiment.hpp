#ifndef AGGDIFF_EXPERIMENT_HPP
#define AGGDIFF_EXPERIMENT_HPP

/// @file experiment.hpp
/// Experiment runner: build a configured problem, integrate it, and persist
/// diagnostics.csv / summary.txt / profile snapshots / a gnuplot script into
/// the output directory. Failures leave partial artifacts plus a FAILED
/// marker file and map to distinct process exit codes.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aggdiff/config.hpp"
#include "aggdiff/diagnostics.hpp"
#include "aggdiff/errors.hpp"
#include "aggdiff/field_ops.hpp"
#include "aggdiff/kernel.hpp"
#include "aggdiff/profiles.hpp"
#include "aggdiff/solver.hpp"

namespace aggdiff {

enum class ExitCode : int {
    ok = 0,
    failure = 1,
    parse = 2,
    blowup = 3,
    precondition = 4,
    io = 5,
};

struct ExperimentResult {
    ExitCode code = ExitCode::ok;
    std::string message;
    std::vector<DiagnosticsRecord> records;
    double profile_mass = 0.0;
    double profile_total_integral = 0.0;
    Field final_state;
};

inline void write_summary(std::ostream& out, const ExperimentConfig& cfg, const Kernel& kernel,
                          const ExperimentResult& result);

namespace detail {

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    return format_double(v);
}

inline std::string norm_label(double p) {
    return std::isinf(p) ? std::string("inf") : format_double(p);
}

inline Field build_datum(const DatumSpec& datum, const Grid& grid, const Kernel& kernel) {
    if (const auto* g = std::get_if<GaussianDatum>(&datum)) {
        double m = g->mass;
        if (g->coupling) {
            if (!(kernel.l1_norm > 0.0))
                throw precondition_error(
                    "datum.coupling requires a kernel with nonzero L1 norm");
            m = *g->coupling / kernel.l1_norm;
        }
        return gaussian_field(grid, m, g->sigma, g->center);
    }
    if (const auto* b = std::get_if<ScaledBumpDatum>(&datum)) {
        if (b->cosine_base) {
            const double mass0 = b->base_mass, width = b->base_width;
            return scaled_bump_field(grid, b->scale_p, [=](double y) {
                if (std::abs(y) >= width) return 0.0;
                const double c = std::cos(0.5 * std::numbers::pi * y / width);
                return (mass0 / width) * c * c;
            });
        }
        const double mass0 = b->base_mass, sigma = b->base_sigma;
        const double amp = mass0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
        return scaled_bump_field(grid, b->scale_p, [=](double y) {
            const double z = y / sigma;
            return amp * std::exp(-0.5 * z * z);
        });
    }
    if (const auto* f = std::get_if<FileDatum>(&datum)) {
        const TabulatedKernel table = load_kernel_table(f->path);  // same two-column format
        Field u = sample_field(grid, [&](double x) { return tabulated_value(table, x); });
        for (double v : u.values)
            if (v < 0.0) throw precondition_error("from-file datum must be nonnegative");
        return u;
    }
    const auto& w = std::get<WaveDatum>(datum);
    return evaluate_wave(DiffusionWave(w.mass, w.total_integral), grid, w.t0);
}

inline VelocityMode resolve_velocity(const ExperimentConfig& cfg, const Kernel& kernel) {
    switch (cfg.velocity) {
        case VelocityChoice::nonlocal: return NonlocalVelocity{kernel};
        case VelocityChoice::local_burgers: return LocalBurgersVelocity{cfg.burgers_coefficient};
        case VelocityChoice::none: return NoVelocity{};
        case VelocityChoice::automatic: break;
    }
    if (std::holds_alternative<ZeroKernel>(*cfg.kernel)) return NoVelocity{};
    return NonlocalVelocity{kernel};
}

inline double profile_total_integral(const ExperimentConfig& cfg, const Kernel& kernel) {
    if (cfg.velocity == VelocityChoice::local_burgers) return cfg.burgers_coefficient;
    if (cfg.velocity == VelocityChoice::none) return 0.0;
    if (cfg.velocity == VelocityChoice::automatic &&
        std::holds_alternative<ZeroKernel>(*cfg.kernel))
        return 0.0;
    return kernel.total_integral;
}

inline void write_diagnostics_csv(std::ostream& out,
                                  const std::vector<DiagnosticsRecord>& records,
                                  const std::vector<double>& norms, bool with_wave) {
    out << "time,mass,peak,first_moment,boundary_mass_fraction";
    for (double p : norms) out << ",norm_p" << norm_label(p);
    for (double p : norms) out << ",scaled_heat_p" << norm_label(p);
    if (with_wave)
        for (double p : norms) out << ",scaled_wave_p" << norm_label(p);
    out << "\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : records) {
        out << csv_number(r.time) << ',' << csv_number(r.mass) << ',' << csv_number(r.peak) << ','
            << csv_number(r.first_moment) << ',' << csv_number(r.boundary_mass_fraction);
        for (double p : norms) {
            const auto it = r.norms.find(p);
            out << ',' << csv_number(it != r.norms.end() ? it->second : nan);
        }
        for (double p : norms) {
            const auto it = r.scaled_heat_distance.find(p);
            out << ',' << csv_number(it != r.scaled_heat_distance.end() ? it->second : nan);
        }
        if (with_wave)
            for (double p : norms) {
                const auto it = r.scaled_wave_distance.find(p);
                out << ',' << csv_number(it != r.scaled_wave_distance.end() ? it->second : nan);
            }
        out << "\n";
    }
}

inline std::string snapshot_filename(double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "profile_t%.6g.csv", t);
    return buf;
}

inline void write_snapshot_csv(std::ostream& out, const Field& u, double profile_mass,
                               double total_integral) {
    const bool with_wave = total_integral != 0.0 && profile_mass != 0.0 && u.time > 0.0;
    std::optional<DiffusionWave> wave;
    if (with_wave) wave.emplace(profile_mass, total_integral);
    const HeatProfile heat{profile_mass};
    out << "x,u,heat_profile";
    if (with_wave) out << ",wave_profile";
    out << "\n";
    for (int i = 0; i < u.size(); ++i) {
        const double x = u.grid.center(i);
        out << csv_number(x) << ',' << csv_number(u[i]);
        out << ',' << csv_number(u.time > 0.0 ? heat.value(x, u.time)
                                              : std::numeric_limits<double>::quiet_NaN());
        if (with_wave) out << ',' << csv_number(wave->value(x, u.time));
        out << "\n";
    }
}

inline void write_plot_script(std::ostream& out, const std::vector<double>& norms, bool with_wave,
                              const std::vector<std::string>& snapshot_files) {
    out << "# gnuplot script; run from this directory: gnuplot plots.gp\n";
    out << "set datafile separator ','\n";
    out << "set terminal pngcairo size 900,600\n";
    out << "set key left bottom\n\n";
    out << "set output 'norms.png'\n";
    out << "set logscale xy\n";
    out << "set xlabel 't'\nset ylabel '||u(t)||_p'\n";
    out << "plot ";
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const std::string col = std::to_string(6 + i);
        out << (i ? ", " : "") << "'diagnostics.csv' using 1:" << col
            << " skip 1 with linespoints title 'p=" << norm_label(norms[i]) << "'";
    }
    out << "\n\n";
    out << "set output 'scaled_distances.png'\n";
    out << "set xlabel 't'\nset ylabel 'scaled profile distance'\n";
    out << "plot ";
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const std::string col = std::to_string(6 + norms.size() + i);
        out << (i ? ", " : "") << "'diagnostics.csv' using 1:" << col
            << " skip 1 with linespoints title 'heat p=" << norm_label(norms[i]) << "'";
    }
    if (with_wave)
        for (std::size_t i = 0; i < norms.size(); ++i) {
            const std::string col = std::to_string(6 + 2 * norms.size() + i);
            out << ", 'diagnostics.csv' using 1:" << col
                << " skip 1 with linespoints title 'wave p=" << norm_label(norms[i]) << "'";
        }
    out << "\n\n";
    if (!snapshot_files.empty()) {
        out << "set output 'profiles.png'\n";
        out << "unset logscale\n";
        out << "set xlabel 'x'\nset ylabel 'u'\n";
        out << "plot ";
        for (std::size_t i = 0; i < snapshot_files.size(); ++i)
            out << (i ? ", " : "") << "'" << snapshot_files[i]
                << "' using 1:2 skip 1 with lines title '" << snapshot_files[i] << "'";
        out << "\n";
    }
}

}  // namespace detail

/// Execute a configured experiment, writing artifacts under cfg.out_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    ExperimentResult result;
    const fs::path dir(cfg.out_dir);

    auto fail = [&](ExitCode code, const std::string& msg) {
        result.code = code;
        result.message = msg;
        // keep whatever diagnostics were collected before the failure
        if (!result.records.empty()) {
            std::ofstream csv(dir / "diagnostics.csv");
            if (csv)
                detail::write_diagnostics_csv(csv, result.records, cfg.norms,
                                              result.profile_total_integral != 0.0);
        }
        std::ofstream marker(dir / "FAILED");
        marker << msg << "\n";
        return result;
    };

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        result.code = ExitCode::io;
        result.message = "cannot create output directory: " + cfg.out_dir;
        return result;
    }
    fs::remove(dir / "FAILED", ec);

    try {
        const Grid grid = make_grid(cfg.half_width, cfg.n_cells);
        const Kernel kernel = sample_kernel(*cfg.kernel, grid);
        const Field u0 = detail::build_datum(*cfg.datum, grid, kernel);
        if (cfg.preset == Preset::concentration) require_even(u0);

        result.profile_mass = mass(u0);
        result.profile_total_integral = detail::profile_total_integral(cfg, kernel);

        SolverConfig scfg;
        scfg.grid = grid;
        scfg.velocity_mode = detail::resolve_velocity(cfg, kernel);
        scfg.t_end = cfg.t_end;
        scfg.cfl_advection = cfg.cfl;
        scfg.dt_max = cfg.dt_max;
        scfg.dt_min = cfg.dt_min;
        scfg.output_times = make_output_times(cfg.schedule, cfg.t_end);

        // choose which output times also get a profile snapshot file
        std::vector<std::size_t> snapshot_idx;
        {
            const std::size_t n_out = scfg.output_times.size();
            const std::size_t want =
                std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.schedule.snapshots, 0)),
                                      n_out);
            for (std::size_t k = 0; k < want; ++k)
                snapshot_idx.push_back(want == 1 ? n_out - 1 : k * (n_out - 1) / (want - 1));
        }

        std::vector<Field> snapshots;
        std::size_t out_index = 0;
        auto sink = [&](const Field& u) {
            result.records.push_back(
                record(u, result.profile_mass, result.profile_total_integral, cfg.norms));
            for (std::size_t idx : snapshot_idx)
                if (idx == out_index) {
                    snapshots.push_back(u);
                    break;
                }
            ++out_index;
        };

        result.final_state = run(u0, scfg, sink);

        // ---- artifacts ----
        const bool with_wave = result.profile_total_integral != 0.0;
        {
            std::ofstream csv(dir / "diagnostics.csv");
            if (!csv) return fail(ExitCode::io, "cannot write diagnostics.csv");
            detail::write_diagnostics_csv(csv, result.records, cfg.norms, with_wave);
        }
        std::vector<std::string> snapshot_files;
        for (const Field& u : snapshots) {
            const std::string name = detail::snapshot_filename(u.time);
            std::ofstream csv(dir / name);
            if (!csv) return fail(ExitCode::io, "cannot write " + name);
            detail::write_snapshot_csv(csv, u, result.profile_mass,
                                       result.profile_total_integral);
            snapshot_files.push_back(name);
        }
        if (cfg.preset == Preset::chemo_equivalence) {
            const Field v = solve_elliptic(u0);
            const Field ku = convolve(chemotaxis_potential_kernel(grid), u0);
            std::ofstream csv(dir / "chemo_equivalence.csv");
            if (!csv) return fail(ExitCode::io, "cannot write chemo_equivalence.csv");
            csv << "x,u,v_elliptic,v_convolution\n";
            for (int i = 0; i < u0.size(); ++i)
                csv << detail::csv_number(grid.center(i)) << ',' << detail::csv_number(u0[i])
                    << ',' << detail::csv_number(v[i]) << ',' << detail::csv_number(ku[i]) << "\n";
        }
        {
            std::ofstream plot(dir / "plots.gp");
            if (!plot) return fail(ExitCode::io, "cannot write plots.gp");
            detail::write_plot_script(plot, cfg.norms, with_wave, snapshot_files);
        }
        {
            std::ofstream summary(dir / "summary.txt");
            if (!summary) return fail(ExitCode::io, "cannot write summary.txt");
            write_summary(summary, cfg, kernel, result);
        }
        {
            std::ofstream cfgout(dir / "config.resolved");
            cfgout << serialize_config(cfg);
        }
        return result;
    } catch (const parse_error& e) {
        return fail(ExitCode::parse, e.what());
    } catch (const stiffness_error& e) {
        return fail(ExitCode::blowup, e.what());
    } catch (const blowup_error& e) {
        return fail(ExitCode::blowup, e.what());
    } catch (const precondition_error& e) {
        return fail(ExitCode::precondition, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(ExitCode::precondition, e.what());
    } catch (const std::exception& e) {
        return fail(ExitCode::failure, e.what());
    }
}

/// Human-readable run summary: fitted exponents, convergence verdicts, mass
/// drift, boundary monitor, and the preset-specific oracle comparisons.
inline void write_summary(std::ostream& out, const ExperimentConfig& cfg, const Kernel& kernel,
                          const ExperimentResult& result) {
    using detail::norm_label;
    const auto& records = result.records;
    out << "preset: " << preset_name(cfg.preset) << "\n";
    out << "grid: L = " << cfg.half_width << ", n_cells = " << cfg.n_cells
        << ", dx = " << kernel.grid.dx << "\n";
    out << "kernel: A = " << detail::format_double(kernel.total_integral)
        << ", l1_norm = " << detail::format_double(kernel.l1_norm) << "\n";
    out << "datum: mass M = " << detail::format_double(result.profile_mass) << "\n";
    out << "t_end = " << cfg.t_end << ", outputs = " << records.size() << "\n\n";

    if (!records.empty() && records.front().mass != 0.0) {
        double drift = 0.0;
        for (const auto& r : records)
            drift = std::max(drift, std::abs(r.mass - records.front().mass) /
                                        std::abs(records.front().mass));
        out << "mass drift: max |M(t)-M(0)|/M(0) = " << detail::format_double(drift) << "\n";
    }
    {
        // boundary monitor: density in boundary cells relative to the sup norm
        double worst = 0.0;
        const double inf = std::numeric_limits<double>::infinity();
        for (const auto& r : records) {
            const auto it = r.norms.find(inf);
            if (it == r.norms.end() || !(it->second > 0.0) || r.mass == 0.0) continue;
            const double density = std::abs(r.boundary_mass_fraction) * std::abs(r.mass) /
                                   (2.0 * kernel.grid.dx);
            worst = std::max(worst, density / it->second);
        }
        out << "boundary monitor: max boundary density / ||u||_inf = "
            << detail::format_double(worst) << (worst > 1e-10 ? "  [WARNING: exceeds 1e-10]" : "")
            << "\n\n";
    }

    out << "decay exponent fits over t in [" << cfg.fit_t_lo << ", " << cfg.fit_t_hi << "]\n";
    for (double p : cfg.norms) {
        std::vector<std::pair<double, double>> series;
        for (const auto& r : records) {
            const auto it = r.norms.find(p);
            if (it != r.norms.end()) series.emplace_back(r.time, it->second);
        }
        out << "  p = " << norm_label(p) << ": ";
        try {
            const DecayFit fit = fit_decay_exponent(series, cfg.fit_t_lo, cfg.fit_t_hi);
            out << "slope = " << detail::format_double(fit.slope)
                << " (theory " << detail::format_double(-scaling_exponent(p))
                << "), r2 = " << detail::format_double(fit.r_squared) << ", points = "
                << fit.points << "\n";
        } catch (const std::exception& e) {
            out << "n/a (" << e.what() << ")\n";
        }
    }

    const bool with_wave = result.profile_total_integral != 0.0;
    out << "\nconvergence of scaled profile distances\n";
    for (const char* kind : {"heat", "wave"}) {
        if (kind[0] == 'w' && !with_wave) continue;
        for (double p : cfg.norms) {
            out << "  " << kind << " p = " << norm_label(p) << ": ";
            try {
                const ConvergenceReport rep = convergence_report(
                    records, p, kind[0] == 'h' ? ProfileKind::heat : ProfileKind::wave);
                out << "reference = " << detail::format_double(rep.reference_value)
                    << ", terminal = " << detail::format_double(rep.terminal_value)
                    << ", eventually decreasing = " << (rep.eventually_decreasing ? "yes" : "no")
                    << ", verdict = " << (rep.converging ? "converging" : "not converging")
                    << "\n";
            } catch (const std::exception& e) {
                out << "n/a (" << e.what() << ")\n";
            }
        }
    }

    if (cfg.preset == Preset::concentration) {
        out << "\nconcentration audit (delta = " << cfg.audit_delta
            << ", gamma = " << cfg.audit_gamma << ")\n";
        try {
            const ConcentrationAudit audit =
                concentration_audit(records, kernel, {cfg.audit_delta, cfg.audit_gamma});
            out << "  initial dI/dt = " << detail::format_double(audit.initial_slope) << "\n";
            out << "  theoretical bound 2u(0,0) - (gamma/2)M^2 + (2 gamma/delta) M I(0) = "
                << detail::format_double(audit.theoretical_bound)
                << " (cell-average hypothesis check)\n";
            out << "  I strictly decreasing on [0, " << detail::format_double(audit.t_observed)
                << "] (margin " << detail::format_double(audit.margin) << ")\n";
            out << "  peak increased over the window: " << (audit.peak_increased ? "yes" : "no")
                << "\n";
            out << "  verdict: "
                << (audit.concentrating ? "concentrating" : "no concentration detected") << "\n";
        } catch (const std::exception& e) {
            out << "  n/a (" << e.what() << ")\n";
        }
    }

    if (cfg.preset == Preset::burgers_oracle && !records.empty()) {
        if (const auto* w = std::get_if<WaveDatum>(&*cfg.datum)) {
            const DiffusionWave wave(w->mass, w->total_integral);
            const Field exact = evaluate_wave(wave, result.final_state.grid, w->t0 + cfg.t_end);
            const double err = max_abs_diff(result.final_state, exact);
            const double ref = lp_norm(exact, std::numeric_limits<double>::infinity());
            out << "\nburgers oracle: max error vs U_{M,A}(., t0 + t_end) = "
                << detail::format_double(err) << " (relative "
                << detail::format_double(err / ref) << ")\n";
        }
    }

    if (cfg.preset == Preset::chemo_equivalence && !records.empty()) {
        const Grid& grid = result.final_state.grid;
        // recompute on the initial state: t_end is 0 for this preset
        const Field& u = result.final_state;
        const Field v = solve_elliptic(u);
        const Field ku = convolve(chemotaxis_potential_kernel(grid), u);
        const double err = max_abs_diff(v, ku);
        const double uref = lp_norm(u, std::numeric_limits<double>::infinity());
        const double bound = 10.0 * grid.dx * grid.dx;
        out << "\nchemo equivalence: ||v - K*u||_inf / ||u||_inf = "
            << detail::format_double(err / uref) << " (bound 10 dx^2 = "
            << detail::format_double(bound) << ", " << (err / uref <= bound ? "ok" : "EXCEEDED")
            << ")\n";
    }
}

}  // namespace aggdiff

#endif
