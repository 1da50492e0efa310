#ifndef AGGDIFF_CHECK_HPP
#define AGGDIFF_CHECK_HPP

/// @file check.hpp
/// Built-in oracle suite behind `aggdiff check`: fast structural invariants
/// that should hold for any correct build, each printed as one pass/fail
/// line. These complement the unit tests; they are compiled into the CLI so
/// a deployed binary can audit itself.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "aggdiff/convolve.hpp"
#include "aggdiff/diagnostics.hpp"
#include "aggdiff/experiment.hpp"
#include "aggdiff/field_ops.hpp"
#include "aggdiff/kernel.hpp"
#include "aggdiff/solver.hpp"

namespace aggdiff {

namespace detail {

class CheckReporter {
public:
    explicit CheckReporter(std::ostream& out) : out_(out) {}

    void record(const std::string& name, bool pass, const std::string& qoi = {}) {
        out_ << (pass ? "[PASS] " : "[FAIL] ") << name;
        if (!qoi.empty()) out_ << "  " << qoi;
        out_ << "\n";
        if (!pass) ++failures_;
    }

    int failures() const noexcept { return failures_; }

private:
    std::ostream& out_;
    int failures_ = 0;
};

inline Field random_field(const Grid& g, std::mt19937& rng, bool nonnegative) {
    std::uniform_real_distribution<double> dist(nonnegative ? 0.0 : -1.0, 1.0);
    Field u(g);
    for (auto& v : u.values) v = dist(rng);
    return u;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

/// Runs every built-in invariant; returns the number of failures.
inline int run_check_suite(std::ostream& out) {
    detail::CheckReporter rep(out);
    std::mt19937 rng(0x5eedu);

    // FFT convolution against the direct-summation reference
    for (int n : {8, 64, 1024}) {
        const Grid g = make_grid(10.0, n);
        const Kernel k = sample_kernel(ChemotaxisKernel{}, g);
        double worst = 0.0;
        for (int rep_i = 0; rep_i < 3; ++rep_i) {
            const Field u = detail::random_field(g, rng, false);
            const Field fast = convolve(k, u);
            const Field direct = convolve_direct(k, u);
            double scale = 0.0;
            for (double v : direct.values) scale = std::max(scale, std::abs(v));
            worst = std::max(worst, max_abs_diff(fast, direct) / std::max(scale, 1e-300));
        }
        std::ostringstream qoi;
        qoi << "(n=" << n << ", rel=" << worst << ", tol=1e-12)";
        rep.record("convolution: FFT path matches direct summation", worst <= 1e-12, qoi.str());
    }

    // convolution linearity
    {
        const Grid g = make_grid(8.0, 256);
        const Kernel k = sample_kernel(GaussianMollifierKernel{0.7, 1.3}, g);
        const Field u = detail::random_field(g, rng, false);
        const Field w = detail::random_field(g, rng, false);
        const double a = 0.37, b = -1.21;
        const Field lhs = convolve(k, axpby(a, u, b, w));
        const Field rhs = axpby(a, convolve(k, u), b, convolve(k, w));
        double scale = lp_norm(rhs, std::numeric_limits<double>::infinity());
        const double rel = max_abs_diff(lhs, rhs) / std::max(scale, 1e-300);
        std::ostringstream qoi;
        qoi << "(rel=" << rel << ", tol=1e-12)";
        rep.record("convolution: linearity", rel <= 1e-12, qoi.str());
    }

    // odd kernels report A = 0 exactly
    {
        const Grid g = make_grid(12.0, 512);
        const Kernel kc = sample_kernel(ChemotaxisKernel{}, g);
        const Kernel ko = sample_kernel(OddGaussianKernel{0.5, 0.8}, g);
        rep.record("kernel: antisymmetric variants have A == 0 bitwise",
                   kc.total_integral == 0.0 && ko.total_integral == 0.0,
                   "(chemotaxis A=" + std::to_string(kc.total_integral) +
                       ", odd-gaussian A=" + std::to_string(ko.total_integral) + ")");
    }

    // even density, odd kernel -> odd velocity
    {
        const Grid g = make_grid(12.0, 512);
        const Kernel k = sample_kernel(ChemotaxisKernel{}, g);
        const Field u = gaussian_field(g, 1.0, 1.0);
        const Field b = convolve(k, u);
        double worst = 0.0, scale = 0.0;
        for (int i = 0; i < g.n_cells; ++i) scale = std::max(scale, std::abs(b[i]));
        for (int i = 0; i < g.n_cells / 2; ++i)
            worst = std::max(worst, std::abs(b[i] + b[g.n_cells - 1 - i]));
        const double rel = worst / std::max(scale, 1e-300);
        std::ostringstream qoi;
        qoi << "(rel=" << rel << ", tol=1e-13)";
        rep.record("convolution: even density with odd kernel gives odd velocity", rel <= 1e-13,
                   qoi.str());
    }

    // positivity and evenness preservation along a nonlinear run
    {
        const Grid g = make_grid(10.0, 512);
        SolverConfig cfg;
        cfg.grid = g;
        cfg.velocity_mode = NonlocalVelocity{sample_kernel(ChemotaxisKernel{}, g)};
        cfg.t_end = 0.5;
        cfg.dt_max = 1e-3;
        const Field u0 = gaussian_field(g, 3.0, 0.8);
        const Field uT = run(u0, cfg);
        double min_v = 0.0, max_v = 0.0, asym = 0.0;
        for (double v : uT.values) {
            min_v = std::min(min_v, v);
            max_v = std::max(max_v, std::abs(v));
        }
        for (int i = 0; i < g.n_cells / 2; ++i)
            asym = std::max(asym, std::abs(uT[i] - uT[g.n_cells - 1 - i]));
        std::ostringstream q1;
        q1 << "(min=" << min_v << ", floor=" << -1e-14 * max_v << ")";
        rep.record("solver: positivity preserved under CFL", min_v >= -1e-14 * max_v, q1.str());
        std::ostringstream q2;
        q2 << "(asym=" << asym / max_v << ", tol=1e-13)";
        rep.record("solver: even data stays even with odd kernel", asym <= 1e-13 * max_v,
                   q2.str());
        const double drift = std::abs(mass(uT) - mass(u0)) / mass(u0);
        std::ostringstream q3;
        q3 << "(drift=" << drift << ", tol=1e-12)";
        rep.record("solver: mass conserved along the run", drift <= 1e-12, q3.str());
    }

    // Hoelder interpolation on norms: ||u||_2 <= sqrt(||u||_1 ||u||_inf)
    {
        const Grid g = make_grid(5.0, 256);
        bool ok = true;
        double worst = 0.0;
        for (int rep_i = 0; rep_i < 5; ++rep_i) {
            const Field u = detail::random_field(g, rng, false);
            const double l1 = lp_norm(u, 1.0), l2 = lp_norm(u, 2.0),
                         li = lp_norm(u, std::numeric_limits<double>::infinity());
            worst = std::max(worst, l2 / std::sqrt(l1 * li));
            if (!(l2 <= std::sqrt(l1 * li) * (1.0 + 1e-13))) ok = false;
        }
        std::ostringstream qoi;
        qoi << "(max ratio=" << worst << ")";
        rep.record("norms: discrete Hoelder interpolation ||u||_2 <= sqrt(||u||_1 ||u||_inf)", ok,
                   qoi.str());
    }

    // first-moment lower bound I >= M^3 / (13.5 ||u||_2^2) on a trajectory
    {
        const Grid g = make_grid(12.0, 512);
        SolverConfig cfg;
        cfg.grid = g;
        cfg.velocity_mode = NonlocalVelocity{sample_kernel(ChemotaxisKernel{}, g)};
        cfg.t_end = 1.0;
        cfg.dt_max = 1e-2;
        cfg.output_times = {0.0, 0.25, 0.5, 0.75, 1.0};
        bool ok = true;
        double slack = std::numeric_limits<double>::infinity();
        const auto sink = [&](const Field& u) {
            const double m = mass(u), l2 = lp_norm(u, 2.0), i1 = first_moment(u);
            const double bound = first_moment_lower_bound(m, l2);
            slack = std::min(slack, i1 / bound);
            if (!(i1 >= bound)) ok = false;
        };
        run(gaussian_field(g, 2.0, 0.7), cfg, sink);
        std::ostringstream qoi;
        qoi << "(min I/bound=" << slack << ")";
        rep.record("diagnostics: first moment above its mass/L2 lower bound", ok, qoi.str());
    }

    // determinism: identical configs give byte-identical diagnostics.csv
    {
        namespace fs = std::filesystem;
        const fs::path base = fs::temp_directory_path() / "aggdiff-check";
        ExperimentConfig cfg;
        cfg.preset = Preset::custom;
        cfg.half_width = 10.0;
        cfg.n_cells = 256;
        cfg.kernel = ChemotaxisKernel{};
        cfg.datum = GaussianDatum{0.5, 1.0, 0.0, std::nullopt};
        cfg.t_end = 0.5;
        cfg.schedule.count = 8;
        cfg.schedule.spacing = Spacing::logarithmic;
        cfg.schedule.t_first = 0.05;
        bool ok = true;
        std::string first;
        for (int i = 0; i < 2; ++i) {
            cfg.out_dir = (base / ("run" + std::to_string(i))).string();
            const ExperimentResult res = run_experiment(cfg);
            if (res.code != ExitCode::ok) ok = false;
            const std::string bytes = detail::read_file(fs::path(cfg.out_dir) / "diagnostics.csv");
            if (i == 0)
                first = bytes;
            else if (bytes != first || bytes.empty())
                ok = false;
        }
        std::error_code ec;
        fs::remove_all(base, ec);
        rep.record("cli: diagnostics.csv is byte-identical across reruns", ok);
    }

    return rep.failures();
}

}  // namespace aggdiff

#endif
