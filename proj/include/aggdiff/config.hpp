#ifndef AGGDIFF_CONFIG_HPP
#define AGGDIFF_CONFIG_HPP

/// @file config.hpp
/// Experiment configuration: flat `key = value` text with optional INI-style
/// sections (a section header prefixes following keys, so `[grid]` + `L = 40`
/// is the same as `grid.L = 40`; an empty header `[]` returns to top level).
/// '#' starts a comment. Later occurrences of a key override earlier ones,
/// which is what `--sweep` and `--out` rely on.

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "aggdiff/errors.hpp"
#include "aggdiff/kernel.hpp"

namespace aggdiff {

enum class Preset {
    heat_asymptotics,
    wave_asymptotics,
    concentration,
    chemo_equivalence,
    burgers_oracle,
    custom,
};

enum class Spacing { linear, logarithmic };

enum class VelocityChoice { automatic, nonlocal, local_burgers, none };

struct GaussianDatum {
    double mass = 1.0;
    double sigma = 1.0;
    double center = 0.0;
    /// When set, mass is derived at runtime from ||K'||_1 * mass = coupling.
    std::optional<double> coupling;
};

struct ScaledBumpDatum {
    double scale_p = 10.0;  // P in u_{0,P}(x) = P^3 u0(P x)
    bool cosine_base = false;
    double base_mass = 1.0;
    double base_sigma = 0.5;  // gaussian base std dev
    double base_width = 1.0;  // cosine base half-support
};

struct FileDatum {
    std::string path;
};

/// Diffusion-wave snapshot U_{M,A}(., t0) as initial datum (Burgers oracle).
struct WaveDatum {
    double mass = 1.0;
    double total_integral = 1.0;
    double t0 = 1.0;
};

using DatumSpec = std::variant<GaussianDatum, ScaledBumpDatum, FileDatum, WaveDatum>;

struct OutputSchedule {
    int count = 40;
    Spacing spacing = Spacing::logarithmic;
    double t_first = 0.0;  // 0 = auto (t_end * 1e-4)
    std::vector<double> explicit_times;
    int snapshots = 5;  // profile csv files to write, spread over the schedule
};

struct ExperimentConfig {
    Preset preset = Preset::custom;
    double half_width = 40.0;
    int n_cells = 4096;
    std::optional<KernelSpec> kernel;
    std::optional<DatumSpec> datum;
    VelocityChoice velocity = VelocityChoice::automatic;
    double burgers_coefficient = 1.0;  // A for velocity = local-burgers
    double t_end = 1.0;
    OutputSchedule schedule;
    std::vector<double> norms = {1.0, 2.0, std::numeric_limits<double>::infinity()};
    double fit_t_lo = 1.0;
    double fit_t_hi = 100.0;
    double cfl = 0.5;
    double dt_max = 1e-2;
    double dt_min = 1e-12;
    double audit_delta = 1.0;
    double audit_gamma = 0.5 * std::exp(-1.0);
    std::string out_dir = "out";
    unsigned long seed = 0;  // reserved, unused by the deterministic presets
};

namespace detail {

struct ConfigEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw parse_error("expected a number, got '" + v + "'", line, key);
    }
}

inline int parse_int(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw parse_error("expected an integer, got '" + v + "'", line, key);
    }
}

inline std::vector<double> parse_double_list(const std::string& v, int line,
                                             const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, line, key));
    }
    if (out.empty()) throw parse_error("expected a comma-separated list", line, key);
    return out;
}

inline void apply_preset_defaults(ExperimentConfig& c) {
    switch (c.preset) {
        case Preset::heat_asymptotics:
            c.half_width = 100.0;
            c.n_cells = 8192;
            c.kernel = ChemotaxisKernel{};
            c.datum = GaussianDatum{1.0, 0.5, 0.0, 0.05};
            c.t_end = 100.0;
            c.dt_max = 1e-2;
            c.fit_t_lo = 1.0;
            c.fit_t_hi = 100.0;
            break;
        case Preset::wave_asymptotics:
            c.half_width = 140.0;
            c.n_cells = 8192;
            // A = a sigma sqrt(2 pi) = 0.5
            c.kernel = GaussianMollifierKernel{0.5 / std::sqrt(2.0 * std::numbers::pi), 1.0};
            c.datum = GaussianDatum{0.5, 0.5, 0.0, std::nullopt};
            c.t_end = 200.0;
            c.dt_max = 1e-2;
            c.fit_t_lo = 1.0;
            c.fit_t_hi = 200.0;
            break;
        case Preset::concentration:
            c.half_width = 6.0;
            c.n_cells = 4096;
            c.kernel = ChemotaxisKernel{};
            c.datum = ScaledBumpDatum{};
            c.t_end = 4e-3;
            c.schedule.spacing = Spacing::linear;
            c.dt_max = 1e-4;
            break;
        case Preset::chemo_equivalence:
            c.half_width = 20.0;
            c.n_cells = 2048;
            c.kernel = ChemotaxisKernel{};
            c.datum = GaussianDatum{1.0, 1.0, 0.0, std::nullopt};
            c.t_end = 0.0;
            break;
        case Preset::burgers_oracle:
            c.half_width = 30.0;
            c.n_cells = 4096;
            c.kernel = ZeroKernel{};
            c.velocity = VelocityChoice::local_burgers;
            c.burgers_coefficient = 1.0;
            c.datum = WaveDatum{1.0, 1.0, 1.0};
            c.t_end = 1.0;
            c.schedule.spacing = Spacing::linear;
            c.schedule.count = 10;
            c.dt_max = 2e-3;
            break;
        case Preset::custom:
            break;
    }
}

inline Preset parse_preset(const std::string& v, int line) {
    if (v == "heat-asymptotics") return Preset::heat_asymptotics;
    if (v == "wave-asymptotics") return Preset::wave_asymptotics;
    if (v == "concentration") return Preset::concentration;
    if (v == "chemo-equivalence") return Preset::chemo_equivalence;
    if (v == "burgers-oracle") return Preset::burgers_oracle;
    if (v == "custom") return Preset::custom;
    throw parse_error("unknown preset '" + v + "'", line, "preset");
}

}  // namespace detail

/// Parse and validate a configuration. Preset defaults are applied first,
/// then explicit keys override them; unknown keys and preset constraint
/// violations are reported with their line number.
inline ExperimentConfig parse_config(const std::string& text) {
    using detail::ConfigEntry;
    std::vector<std::pair<std::string, ConfigEntry>> entries;
    {
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw parse_error("malformed section header", lineno);
                section = detail::trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw parse_error("expected 'key = value'", lineno);
            std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw parse_error("empty key", lineno);
            if (!section.empty() && key.find('.') == std::string::npos)
                key = section + "." + key;
            entries.emplace_back(key, ConfigEntry{value, lineno, false});
        }
    }

    // later occurrences override earlier ones
    auto last_of = [&](const std::string& key) -> ConfigEntry* {
        ConfigEntry* found = nullptr;
        for (auto& [k, e] : entries)
            if (k == key) found = &e;
        return found;
    };
    auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
        ConfigEntry* e = last_of(key);
        if (!e) return std::nullopt;
        for (auto& [k, other] : entries)
            if (k == key) other.used = true;
        return std::make_pair(e->value, e->line);
    };

    ExperimentConfig cfg;
    if (auto p = take("preset")) cfg.preset = detail::parse_preset(p->first, p->second);
    detail::apply_preset_defaults(cfg);

    if (auto e = take("grid.L")) cfg.half_width = detail::parse_double(e->first, e->second, "grid.L");
    if (auto e = take("grid.n_cells"))
        cfg.n_cells = detail::parse_int(e->first, e->second, "grid.n_cells");

    if (auto e = take("kernel.type")) {
        const std::string& v = e->first;
        if (v == "zero")
            cfg.kernel = ZeroKernel{};
        else if (v == "chemotaxis")
            cfg.kernel = ChemotaxisKernel{};
        else if (v == "gaussian")
            cfg.kernel = GaussianMollifierKernel{};
        else if (v == "odd-gaussian")
            cfg.kernel = OddGaussianKernel{};
        else if (v == "tabulated")
            cfg.kernel = TabulatedKernel{};
        else
            throw parse_error("unknown kernel type '" + v + "'", e->second, "kernel.type");
    }
    if (auto e = take("kernel.amplitude")) {
        const double a = detail::parse_double(e->first, e->second, "kernel.amplitude");
        if (auto* g = cfg.kernel ? std::get_if<GaussianMollifierKernel>(&*cfg.kernel) : nullptr)
            g->amplitude = a;
        else if (auto* og = cfg.kernel ? std::get_if<OddGaussianKernel>(&*cfg.kernel) : nullptr)
            og->amplitude = a;
        else
            throw parse_error("kernel.amplitude requires a gaussian kernel type", e->second,
                              "kernel.amplitude");
    }
    if (auto e = take("kernel.sigma")) {
        const double s = detail::parse_double(e->first, e->second, "kernel.sigma");
        if (auto* g = cfg.kernel ? std::get_if<GaussianMollifierKernel>(&*cfg.kernel) : nullptr)
            g->width = s;
        else if (auto* og = cfg.kernel ? std::get_if<OddGaussianKernel>(&*cfg.kernel) : nullptr)
            og->width = s;
        else
            throw parse_error("kernel.sigma requires a gaussian kernel type", e->second,
                              "kernel.sigma");
    }
    if (auto e = take("kernel.file")) {
        if (!cfg.kernel || !std::holds_alternative<TabulatedKernel>(*cfg.kernel))
            throw parse_error("kernel.file requires kernel.type = tabulated", e->second,
                              "kernel.file");
        try {
            cfg.kernel = load_kernel_table(e->first);
        } catch (const std::exception& table_error) {
            throw parse_error(table_error.what(), e->second, "kernel.file");
        }
    }

    if (auto e = take("datum.type")) {
        const std::string& v = e->first;
        if (v == "gaussian")
            cfg.datum = GaussianDatum{};
        else if (v == "scaled-bump")
            cfg.datum = ScaledBumpDatum{};
        else if (v == "from-file")
            cfg.datum = FileDatum{};
        else if (v == "wave")
            cfg.datum = WaveDatum{};
        else
            throw parse_error("unknown datum type '" + v + "'", e->second, "datum.type");
    }
    auto with_gaussian = [&](const char* key, int line) -> GaussianDatum& {
        if (auto* g = cfg.datum ? std::get_if<GaussianDatum>(&*cfg.datum) : nullptr) return *g;
        throw parse_error(std::string(key) + " requires datum.type = gaussian", line, key);
    };
    auto with_bump = [&](const char* key, int line) -> ScaledBumpDatum& {
        if (auto* b = cfg.datum ? std::get_if<ScaledBumpDatum>(&*cfg.datum) : nullptr) return *b;
        throw parse_error(std::string(key) + " requires datum.type = scaled-bump", line, key);
    };
    auto with_wave = [&](const char* key, int line) -> WaveDatum& {
        if (auto* w = cfg.datum ? std::get_if<WaveDatum>(&*cfg.datum) : nullptr) return *w;
        throw parse_error(std::string(key) + " requires datum.type = wave", line, key);
    };
    if (auto e = take("datum.mass"))
        with_gaussian("datum.mass", e->second).mass =
            detail::parse_double(e->first, e->second, "datum.mass");
    if (auto e = take("datum.sigma"))
        with_gaussian("datum.sigma", e->second).sigma =
            detail::parse_double(e->first, e->second, "datum.sigma");
    if (auto e = take("datum.center"))
        with_gaussian("datum.center", e->second).center =
            detail::parse_double(e->first, e->second, "datum.center");
    if (auto e = take("datum.coupling"))
        with_gaussian("datum.coupling", e->second).coupling =
            detail::parse_double(e->first, e->second, "datum.coupling");
    if (auto e = take("datum.P"))
        with_bump("datum.P", e->second).scale_p =
            detail::parse_double(e->first, e->second, "datum.P");
    if (auto e = take("datum.base")) {
        auto& b = with_bump("datum.base", e->second);
        if (e->first == "gaussian")
            b.cosine_base = false;
        else if (e->first == "cosine")
            b.cosine_base = true;
        else
            throw parse_error("datum.base must be gaussian or cosine", e->second, "datum.base");
    }
    if (auto e = take("datum.base_mass"))
        with_bump("datum.base_mass", e->second).base_mass =
            detail::parse_double(e->first, e->second, "datum.base_mass");
    if (auto e = take("datum.base_sigma"))
        with_bump("datum.base_sigma", e->second).base_sigma =
            detail::parse_double(e->first, e->second, "datum.base_sigma");
    if (auto e = take("datum.base_width"))
        with_bump("datum.base_width", e->second).base_width =
            detail::parse_double(e->first, e->second, "datum.base_width");
    if (auto e = take("datum.file")) {
        if (!cfg.datum || !std::holds_alternative<FileDatum>(*cfg.datum))
            throw parse_error("datum.file requires datum.type = from-file", e->second,
                              "datum.file");
        cfg.datum = FileDatum{e->first};
    }
    if (auto e = take("datum.wave_mass"))
        with_wave("datum.wave_mass", e->second).mass =
            detail::parse_double(e->first, e->second, "datum.wave_mass");
    if (auto e = take("datum.wave_A"))
        with_wave("datum.wave_A", e->second).total_integral =
            detail::parse_double(e->first, e->second, "datum.wave_A");
    if (auto e = take("datum.wave_t0"))
        with_wave("datum.wave_t0", e->second).t0 =
            detail::parse_double(e->first, e->second, "datum.wave_t0");

    if (auto e = take("solver.velocity")) {
        const std::string& v = e->first;
        if (v == "auto")
            cfg.velocity = VelocityChoice::automatic;
        else if (v == "nonlocal")
            cfg.velocity = VelocityChoice::nonlocal;
        else if (v == "local-burgers")
            cfg.velocity = VelocityChoice::local_burgers;
        else if (v == "none")
            cfg.velocity = VelocityChoice::none;
        else
            throw parse_error("unknown velocity '" + v + "'", e->second, "solver.velocity");
    }
    if (auto e = take("solver.burgers_A"))
        cfg.burgers_coefficient = detail::parse_double(e->first, e->second, "solver.burgers_A");
    if (auto e = take("solver.cfl"))
        cfg.cfl = detail::parse_double(e->first, e->second, "solver.cfl");
    if (auto e = take("solver.dt_max"))
        cfg.dt_max = detail::parse_double(e->first, e->second, "solver.dt_max");
    if (auto e = take("solver.dt_min"))
        cfg.dt_min = detail::parse_double(e->first, e->second, "solver.dt_min");

    if (auto e = take("t_end")) cfg.t_end = detail::parse_double(e->first, e->second, "t_end");
    if (auto e = take("out_dir")) cfg.out_dir = e->first;
    if (auto e = take("seed"))
        cfg.seed = static_cast<unsigned long>(detail::parse_int(e->first, e->second, "seed"));

    if (auto e = take("output.count"))
        cfg.schedule.count = detail::parse_int(e->first, e->second, "output.count");
    if (auto e = take("output.spacing")) {
        if (e->first == "linear")
            cfg.schedule.spacing = Spacing::linear;
        else if (e->first == "logarithmic")
            cfg.schedule.spacing = Spacing::logarithmic;
        else
            throw parse_error("output.spacing must be linear or logarithmic", e->second,
                              "output.spacing");
    }
    if (auto e = take("output.t_first"))
        cfg.schedule.t_first = detail::parse_double(e->first, e->second, "output.t_first");
    if (auto e = take("output.times"))
        cfg.schedule.explicit_times = detail::parse_double_list(e->first, e->second,
                                                                "output.times");
    if (auto e = take("output.snapshots"))
        cfg.schedule.snapshots = detail::parse_int(e->first, e->second, "output.snapshots");

    if (auto e = take("diagnostics.norms"))
        cfg.norms = detail::parse_double_list(e->first, e->second, "diagnostics.norms");
    if (auto e = take("diagnostics.fit_window")) {
        const auto w = detail::parse_double_list(e->first, e->second, "diagnostics.fit_window");
        if (w.size() != 2)
            throw parse_error("fit_window needs exactly two values", e->second,
                              "diagnostics.fit_window");
        cfg.fit_t_lo = w[0];
        cfg.fit_t_hi = w[1];
    }
    if (auto e = take("diagnostics.delta"))
        cfg.audit_delta = detail::parse_double(e->first, e->second, "diagnostics.delta");
    if (auto e = take("diagnostics.gamma"))
        cfg.audit_gamma = detail::parse_double(e->first, e->second, "diagnostics.gamma");

    for (const auto& [k, e] : entries)
        if (!e.used) throw parse_error("unknown key", e.line, k);

    // structural validation
    if (!cfg.kernel)
        throw parse_error("missing required key (custom preset needs a kernel)", 0, "kernel.type");
    if (!cfg.datum)
        throw parse_error("missing required key (custom preset needs a datum)", 0, "datum.type");
    if (cfg.preset == Preset::concentration) {
        if (!std::holds_alternative<ScaledBumpDatum>(*cfg.datum))
            throw parse_error("concentration preset requires datum.type = scaled-bump", 0,
                              "datum.type");
        const bool odd_kernel = std::holds_alternative<ChemotaxisKernel>(*cfg.kernel) ||
                                std::holds_alternative<OddGaussianKernel>(*cfg.kernel);
        if (!odd_kernel)
            throw parse_error("concentration preset requires an odd kernel "
                              "(chemotaxis or odd-gaussian)",
                              0, "kernel.type");
    }
    if (cfg.n_cells < 4 || cfg.n_cells % 2 != 0)
        throw parse_error("n_cells must be even and >= 4", 0, "grid.n_cells");
    if (!(cfg.half_width > 0.0)) throw parse_error("L must be positive", 0, "grid.L");
    if (!(cfg.t_end >= 0.0)) throw parse_error("t_end must be nonnegative", 0, "t_end");
    for (double p : cfg.norms)
        if (!(p >= 1.0)) throw parse_error("norm orders must be >= 1", 0, "diagnostics.norms");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0))
        throw parse_error("cfl must lie in (0, 1]", 0, "solver.cfl");
    return cfg;
}

namespace detail {

inline std::string format_double(double v) {
    if (std::isinf(v)) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline std::string preset_name(Preset p) {
    switch (p) {
        case Preset::heat_asymptotics: return "heat-asymptotics";
        case Preset::wave_asymptotics: return "wave-asymptotics";
        case Preset::concentration: return "concentration";
        case Preset::chemo_equivalence: return "chemo-equivalence";
        case Preset::burgers_oracle: return "burgers-oracle";
        case Preset::custom: return "custom";
    }
    return "custom";
}

/// Canonical text form; parse(serialize(cfg)) reproduces cfg.
inline std::string serialize_config(const ExperimentConfig& cfg) {
    using detail::format_double;
    std::ostringstream out;
    out << "preset = " << preset_name(cfg.preset) << "\n";
    out << "t_end = " << format_double(cfg.t_end) << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "\n[grid]\n";
    out << "L = " << format_double(cfg.half_width) << "\n";
    out << "n_cells = " << cfg.n_cells << "\n";

    out << "\n[kernel]\n";
    if (std::holds_alternative<ZeroKernel>(*cfg.kernel)) {
        out << "type = zero\n";
    } else if (std::holds_alternative<ChemotaxisKernel>(*cfg.kernel)) {
        out << "type = chemotaxis\n";
    } else if (const auto* g = std::get_if<GaussianMollifierKernel>(&*cfg.kernel)) {
        out << "type = gaussian\n";
        out << "amplitude = " << format_double(g->amplitude) << "\n";
        out << "sigma = " << format_double(g->width) << "\n";
    } else if (const auto* og = std::get_if<OddGaussianKernel>(&*cfg.kernel)) {
        out << "type = odd-gaussian\n";
        out << "amplitude = " << format_double(og->amplitude) << "\n";
        out << "sigma = " << format_double(og->width) << "\n";
    } else {
        out << "type = tabulated\n";  // table data itself is not round-tripped
    }

    out << "\n[datum]\n";
    if (const auto* g = std::get_if<GaussianDatum>(&*cfg.datum)) {
        out << "type = gaussian\n";
        if (g->coupling)
            out << "coupling = " << format_double(*g->coupling) << "\n";
        else
            out << "mass = " << format_double(g->mass) << "\n";
        out << "sigma = " << format_double(g->sigma) << "\n";
        out << "center = " << format_double(g->center) << "\n";
    } else if (const auto* b = std::get_if<ScaledBumpDatum>(&*cfg.datum)) {
        out << "type = scaled-bump\n";
        out << "P = " << format_double(b->scale_p) << "\n";
        out << "base = " << (b->cosine_base ? "cosine" : "gaussian") << "\n";
        out << "base_mass = " << format_double(b->base_mass) << "\n";
        if (b->cosine_base)
            out << "base_width = " << format_double(b->base_width) << "\n";
        else
            out << "base_sigma = " << format_double(b->base_sigma) << "\n";
    } else if (const auto* f = std::get_if<FileDatum>(&*cfg.datum)) {
        out << "type = from-file\n";
        out << "file = " << f->path << "\n";
    } else if (const auto* w = std::get_if<WaveDatum>(&*cfg.datum)) {
        out << "type = wave\n";
        out << "wave_mass = " << format_double(w->mass) << "\n";
        out << "wave_A = " << format_double(w->total_integral) << "\n";
        out << "wave_t0 = " << format_double(w->t0) << "\n";
    }

    out << "\n[solver]\n";
    switch (cfg.velocity) {
        case VelocityChoice::automatic: out << "velocity = auto\n"; break;
        case VelocityChoice::nonlocal: out << "velocity = nonlocal\n"; break;
        case VelocityChoice::local_burgers:
            out << "velocity = local-burgers\n";
            out << "burgers_A = " << format_double(cfg.burgers_coefficient) << "\n";
            break;
        case VelocityChoice::none: out << "velocity = none\n"; break;
    }
    out << "cfl = " << format_double(cfg.cfl) << "\n";
    out << "dt_max = " << format_double(cfg.dt_max) << "\n";
    out << "dt_min = " << format_double(cfg.dt_min) << "\n";

    out << "\n[output]\n";
    out << "count = " << cfg.schedule.count << "\n";
    out << "spacing = " << (cfg.schedule.spacing == Spacing::linear ? "linear" : "logarithmic")
        << "\n";
    if (cfg.schedule.t_first > 0.0)
        out << "t_first = " << format_double(cfg.schedule.t_first) << "\n";
    if (!cfg.schedule.explicit_times.empty()) {
        out << "times = ";
        for (std::size_t i = 0; i < cfg.schedule.explicit_times.size(); ++i)
            out << (i ? "," : "") << format_double(cfg.schedule.explicit_times[i]);
        out << "\n";
    }
    out << "snapshots = " << cfg.schedule.snapshots << "\n";

    out << "\n[diagnostics]\n";
    out << "norms = ";
    for (std::size_t i = 0; i < cfg.norms.size(); ++i)
        out << (i ? "," : "") << format_double(cfg.norms[i]);
    out << "\n";
    out << "fit_window = " << format_double(cfg.fit_t_lo) << "," << format_double(cfg.fit_t_hi)
        << "\n";
    if (cfg.preset == Preset::concentration) {
        out << "delta = " << format_double(cfg.audit_delta) << "\n";
        out << "gamma = " << format_double(cfg.audit_gamma) << "\n";
    }
    return out.str();
}

/// Output-time schedule: always starts at 0; log spacing covers
/// [t_first, t_end] with equal weight per decade.
inline std::vector<double> make_output_times(const OutputSchedule& s, double t_end) {
    if (!s.explicit_times.empty()) return s.explicit_times;
    std::vector<double> times{0.0};
    if (t_end <= 0.0) return times;
    if (s.spacing == Spacing::linear) {
        for (int k = 1; k <= s.count; ++k)
            times.push_back(t_end * static_cast<double>(k) / static_cast<double>(s.count));
    } else {
        const double t0 = s.t_first > 0.0 ? s.t_first : t_end * 1e-4;
        const double ratio = t_end / t0;
        for (int k = 0; k < s.count; ++k) {
            const double f = s.count == 1
                                 ? 1.0
                                 : static_cast<double>(k) / static_cast<double>(s.count - 1);
            times.push_back(t0 * std::pow(ratio, f));
        }
        times.back() = t_end;
    }
    return times;
}

}  // namespace aggdiff

#endif
