#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "aggdiff/config.hpp"
#include "aggdiff/experiment.hpp"

using namespace aggdiff;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& leaf) {
    const fs::path p = fs::temp_directory_path() / "aggdiff-tests" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

const char* kMinimalCustom = R"(
preset = custom
t_end = 0.5
[kernel]
type = chemotaxis
[datum]
type = gaussian
mass = 0.5
sigma = 1
)";

}  // namespace

TEST_CASE("parse_config fills defaults") {
    const ExperimentConfig cfg = parse_config(kMinimalCustom);
    CHECK(cfg.preset == Preset::custom);
    CHECK(cfg.half_width == 40.0);
    CHECK(cfg.n_cells == 4096);
    CHECK(cfg.schedule.count == 40);
    CHECK(cfg.schedule.spacing == Spacing::logarithmic);
    CHECK(cfg.norms.size() == 3);
    CHECK(std::isinf(cfg.norms.back()));
    CHECK(std::holds_alternative<ChemotaxisKernel>(*cfg.kernel));
    const auto& datum = std::get<GaussianDatum>(*cfg.datum);
    CHECK(datum.mass == 0.5);
    CHECK_FALSE(datum.coupling.has_value());
}

TEST_CASE("sections and dotted keys are interchangeable; last value wins") {
    const ExperimentConfig a = parse_config(
        "preset = custom\nt_end = 1\nkernel.type = zero\ndatum.type = gaussian\n");
    CHECK(std::holds_alternative<ZeroKernel>(*a.kernel));

    const ExperimentConfig b = parse_config(
        "preset = custom\nt_end = 1\n[kernel]\ntype = zero\n[datum]\ntype = gaussian\n"
        "[grid]\nn_cells = 512\nn_cells = 1024\n");
    CHECK(b.n_cells == 1024);
}

TEST_CASE("parse_config reports errors with line and key") {
    SECTION("unknown key") {
        try {
            parse_config("preset = custom\nbogus_key = 3\n");
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 2);
            CHECK(e.key() == "bogus_key");
        }
    }
    SECTION("bad number") {
        CHECK_THROWS_AS(parse_config("preset = custom\nt_end = fast\n"), parse_error);
    }
    SECTION("malformed lines") {
        CHECK_THROWS_AS(parse_config("[kernel\ntype = zero\n"), parse_error);
        CHECK_THROWS_AS(parse_config("just some words\n"), parse_error);
    }
    SECTION("missing kernel or datum") {
        CHECK_THROWS_AS(parse_config("preset = custom\nkernel.type = zero\n"), parse_error);
        CHECK_THROWS_AS(parse_config("preset = custom\ndatum.type = gaussian\n"), parse_error);
    }
    SECTION("grid constraints") {
        CHECK_THROWS_AS(parse_config(std::string(kMinimalCustom) + "grid.n_cells = 81\n"),
                        parse_error);
        CHECK_THROWS_AS(parse_config(std::string(kMinimalCustom) + "grid.L = -3\n"), parse_error);
    }
    SECTION("cfl outside (0, 1]") {
        CHECK_THROWS_AS(parse_config(std::string(kMinimalCustom) + "solver.cfl = 1.5\n"),
                        parse_error);
        CHECK_THROWS_AS(parse_config(std::string(kMinimalCustom) + "solver.cfl = 0\n"),
                        parse_error);
    }
    SECTION("norm orders below 1") {
        CHECK_THROWS_AS(parse_config(std::string(kMinimalCustom) + "diagnostics.norms = 0.5\n"),
                        parse_error);
    }
}

TEST_CASE("concentration preset constraints") {
    CHECK_THROWS_WITH(
        parse_config("preset = concentration\ndatum.type = gaussian\n"),
        Catch::Matchers::ContainsSubstring("scaled-bump"));
    CHECK_THROWS_WITH(
        parse_config("preset = concentration\nkernel.type = gaussian\n"),
        Catch::Matchers::ContainsSubstring("odd kernel"));
    // the preset's own defaults satisfy the constraints
    CHECK_NOTHROW(parse_config("preset = concentration\n"));
}

TEST_CASE("presets load their bundled defaults") {
    const ExperimentConfig heat = parse_config("preset = heat-asymptotics\n");
    CHECK(heat.half_width == 100.0);
    CHECK(std::holds_alternative<ChemotaxisKernel>(*heat.kernel));
    const auto& d = std::get<GaussianDatum>(*heat.datum);
    REQUIRE(d.coupling.has_value());
    CHECK(*d.coupling == 0.05);

    const ExperimentConfig burg = parse_config("preset = burgers-oracle\n");
    CHECK(burg.velocity == VelocityChoice::local_burgers);
    CHECK(std::holds_alternative<WaveDatum>(*burg.datum));

    // preset defaults remain overridable
    const ExperimentConfig heat2 = parse_config("preset = heat-asymptotics\ngrid.n_cells = 512\n");
    CHECK(heat2.n_cells == 512);
}

TEST_CASE("serialize / parse round trip is idempotent") {
    for (const std::string text :
         {std::string(kMinimalCustom), std::string("preset = heat-asymptotics\n"),
          std::string("preset = concentration\ndatum.P = 10\n"),
          std::string("preset = burgers-oracle\n")}) {
        const std::string once = serialize_config(parse_config(text));
        const std::string twice = serialize_config(parse_config(once));
        REQUIRE(once == twice);
    }
}

TEST_CASE("make_output_times") {
    OutputSchedule lin;
    lin.spacing = Spacing::linear;
    lin.count = 4;
    const auto lt = make_output_times(lin, 2.0);
    REQUIRE(lt.size() == 5);
    CHECK(lt.front() == 0.0);
    CHECK(lt.back() == 2.0);
    CHECK(lt[2] == Catch::Approx(1.0));

    OutputSchedule log;
    log.count = 9;
    log.t_first = 0.01;
    const auto gt = make_output_times(log, 100.0);
    REQUIRE(gt.size() == 10);
    CHECK(gt.front() == 0.0);
    CHECK(gt[1] == Catch::Approx(0.01));
    CHECK(gt.back() == 100.0);
    // equal spacing per decade
    CHECK(gt[2] / gt[1] == Catch::Approx(gt[3] / gt[2]).epsilon(1e-12));

    OutputSchedule expl;
    expl.explicit_times = {0.0, 0.5, 1.0};
    CHECK(make_output_times(expl, 1.0) == std::vector<double>{0.0, 0.5, 1.0});

    CHECK(make_output_times(log, 0.0) == std::vector<double>{0.0});
}

TEST_CASE("run_experiment writes the artifact set deterministically") {
    const fs::path dir = scratch_dir("smoke");
    ExperimentConfig cfg = parse_config(std::string(kMinimalCustom) +
                                        "grid.L = 10\ngrid.n_cells = 256\n"
                                        "output.count = 8\noutput.t_first = 0.05\n");
    cfg.out_dir = (dir / "run").string();

    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.code == ExitCode::ok);
    REQUIRE(res.records.size() == 9);  // t = 0 plus 8 logarithmic outputs

    for (const char* name :
         {"diagnostics.csv", "summary.txt", "plots.gp", "config.resolved"})
        REQUIRE(fs::exists(fs::path(cfg.out_dir) / name));
    CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "FAILED"));

    const std::string csv = slurp(fs::path(cfg.out_dir) / "diagnostics.csv");
    // pinned schema for the default norm set (chemotaxis kernel: A = 0, no wave columns)
    const std::string header =
        "time,mass,peak,first_moment,boundary_mass_fraction,"
        "norm_p1,norm_p2,norm_pinf,scaled_heat_p1,scaled_heat_p2,scaled_heat_pinf";
    REQUIRE(csv.substr(0, header.size()) == header);

    // deterministic rerun
    cfg.out_dir = (dir / "run2").string();
    run_experiment(cfg);
    CHECK(slurp(fs::path(dir / "run" / "diagnostics.csv")) ==
          slurp(fs::path(dir / "run2" / "diagnostics.csv")));

    // snapshots exist (first positive output time and the final time)
    int snapshot_count = 0;
    for (const auto& entry : fs::directory_iterator(cfg.out_dir))
        if (entry.path().filename().string().starts_with("profile_t")) ++snapshot_count;
    CHECK(snapshot_count == 5);
}

TEST_CASE("run_experiment with a wave velocity emits wave columns") {
    const fs::path dir = scratch_dir("wave-columns");
    ExperimentConfig cfg = parse_config(
        "preset = burgers-oracle\ngrid.n_cells = 512\ngrid.L = 15\noutput.count = 4\n"
        "solver.dt_max = 1e-2\nt_end = 0.25\n");
    cfg.out_dir = (dir / "out").string();
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.code == ExitCode::ok);
    const std::string csv = slurp(fs::path(cfg.out_dir) / "diagnostics.csv");
    CHECK(csv.find("scaled_wave_p1") != std::string::npos);
    const std::string summary = slurp(fs::path(cfg.out_dir) / "summary.txt");
    CHECK(summary.find("burgers oracle") != std::string::npos);
}

TEST_CASE("tabulated kernel round trip through config and file") {
    const fs::path dir = scratch_dir("tabfile");
    const fs::path table = dir / "kernel.txt";
    {
        std::ofstream out(table);
        out << "# odd attractive kernel samples\n";
        for (int i = -400; i <= 400; ++i) {
            const double x = 0.02 * i;
            out << x << " " << -x * std::exp(-x * x) << "\n";
        }
    }
    ExperimentConfig cfg = parse_config(
        "preset = custom\nt_end = 0.05\n[grid]\nL = 8\nn_cells = 256\n"
        "[kernel]\ntype = tabulated\nfile = " + table.string() + "\n"
        "[datum]\ntype = gaussian\nmass = 1\nsigma = 1\n[output]\ncount = 4\n");
    cfg.out_dir = (dir / "out").string();
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.code == ExitCode::ok);
    CHECK(res.profile_total_integral == Catch::Approx(0.0).margin(1e-12));  // odd table
}

TEST_CASE("run_experiment failure modes leave a FAILED marker") {
    SECTION("stiffness abort maps to the blow-up exit code") {
        const fs::path dir = scratch_dir("stiff");
        ExperimentConfig cfg =
            parse_config("preset = custom\nt_end = 0.1\n[kernel]\ntype = chemotaxis\n"
                         "[datum]\ntype = scaled-bump\nP = 6\n"
                         "[grid]\nL = 6\nn_cells = 1024\n[solver]\ndt_min = 5e-4\n"
                         "[output]\nspacing = linear\ncount = 20\n");
        cfg.out_dir = (dir / "out").string();
        const ExperimentResult res = run_experiment(cfg);
        CHECK(res.code == ExitCode::blowup);
        CHECK(fs::exists(fs::path(cfg.out_dir) / "FAILED"));
        // partial diagnostics stay on disk next to the marker
        CHECK(fs::exists(fs::path(cfg.out_dir) / "diagnostics.csv"));
    }

    SECTION("coupling with a zero kernel is a precondition failure") {
        const fs::path dir = scratch_dir("precond");
        ExperimentConfig cfg =
            parse_config("preset = custom\nt_end = 0.1\n[kernel]\ntype = zero\n"
                         "[datum]\ntype = gaussian\ncoupling = 0.05\n");
        cfg.out_dir = (dir / "out").string();
        const ExperimentResult res = run_experiment(cfg);
        CHECK(res.code == ExitCode::precondition);
        CHECK(fs::exists(fs::path(cfg.out_dir) / "FAILED"));
    }
}

TEST_CASE("run_experiment maps unwritable output to the io exit code") {
    const fs::path dir = scratch_dir("iofail");
    const fs::path blocker = dir / "blocker";
    std::ofstream(blocker) << "occupied";
    ExperimentConfig cfg = parse_config(kMinimalCustom);
    cfg.n_cells = 64;
    cfg.half_width = 4.0;
    cfg.out_dir = (blocker / "sub").string();  // parent is a regular file
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.code == ExitCode::io);
}

TEST_CASE("from-file datum loads, clamps and validates") {
    const fs::path dir = scratch_dir("datumfile");
    const fs::path good = dir / "bump.txt";
    {
        std::ofstream out(good);
        for (int i = -200; i <= 200; ++i) {
            const double x = 0.05 * i;
            out << x << " " << std::exp(-x * x) << "\n";
        }
    }
    ExperimentConfig cfg = parse_config(
        "preset = custom\nt_end = 0.1\n[grid]\nL = 12\nn_cells = 256\n"
        "[kernel]\ntype = zero\n[datum]\ntype = from-file\nfile = " + good.string() +
        "\n[output]\ncount = 4\n");
    cfg.out_dir = (dir / "out").string();
    const ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.code == ExitCode::ok);
    // interpolant mass ~ sqrt(pi), conserved along the run
    CHECK(res.records.front().mass == Catch::Approx(std::sqrt(std::numbers::pi)).margin(1e-3));
    CHECK(res.records.back().mass == Catch::Approx(res.records.front().mass).epsilon(1e-12));

    const fs::path bad = dir / "negative.txt";
    std::ofstream(bad) << "-1 0.5\n0 -1.0\n1 0.5\n";
    ExperimentConfig neg = cfg;
    neg.datum = FileDatum{bad.string()};
    neg.out_dir = (dir / "out2").string();
    CHECK(run_experiment(neg).code == ExitCode::precondition);
}

TEST_CASE("cosine-base scaled bump parses and builds an even datum") {
    const ExperimentConfig cfg = parse_config(
        "preset = concentration\ndatum.base = cosine\ndatum.base_width = 2\ndatum.P = 4\n"
        "[]\ngrid.L = 6\ngrid.n_cells = 512\n");
    const auto& b = std::get<ScaledBumpDatum>(*cfg.datum);
    CHECK(b.cosine_base);
    const Grid g = make_grid(cfg.half_width, cfg.n_cells);
    const Kernel k = sample_kernel(*cfg.kernel, g);
    const Field u0 = aggdiff::detail::build_datum(*cfg.datum, g, k);
    for (int i = 0; i < g.n_cells / 2; ++i) REQUIRE(u0[i] == u0[g.n_cells - 1 - i]);
    CHECK(mass(u0) == Catch::Approx(16.0).epsilon(1e-4));  // P^2 * base mass, O(dx^2) edge kink
}

TEST_CASE("missing kernel table file surfaces as a parse error on its line") {
    try {
        parse_config("preset = custom\nt_end = 1\n[kernel]\ntype = tabulated\n"
                     "file = /nonexistent/nowhere.txt\n[datum]\ntype = gaussian\n");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.key() == "kernel.file");
        CHECK(e.line() == 5);
    }
}

#ifdef AGGDIFF_CLI_PATH
namespace {
int run_cli(const std::string& args) {
    const std::string cmd = std::string(AGGDIFF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}
}  // namespace

TEST_CASE("command line: run and check") {
    const fs::path dir = scratch_dir("cli");
    const fs::path cfg_path = dir / "exp.cfg";
    {
        std::ofstream out(cfg_path);
        out << kMinimalCustom << "grid.L = 10\ngrid.n_cells = 256\noutput.count = 6\n";
    }

    SECTION("run writes artifacts and exits 0") {
        const int code =
            run_cli("run " + cfg_path.string() + " --out " + (dir / "out").string());
        CHECK(code == 0);
        CHECK(fs::exists(dir / "out" / "diagnostics.csv"));
        CHECK(fs::exists(dir / "out" / "summary.txt"));
    }

    SECTION("sweep runs one directory per value") {
        const int code = run_cli("run " + cfg_path.string() + " --sweep datum.mass=0.5,1.0 --out " +
                                 (dir / "sweep").string());
        CHECK(code == 0);
        CHECK(fs::exists(dir / "sweep" / "datum.mass=0.5" / "diagnostics.csv"));
        CHECK(fs::exists(dir / "sweep" / "datum.mass=1.0" / "diagnostics.csv"));
    }

    SECTION("config errors exit with the parse code") {
        const fs::path bad = dir / "bad.cfg";
        std::ofstream(bad) << "preset = custom\nwhat = ever\n";
        CHECK(run_cli("run " + bad.string()) == 2);
        CHECK(run_cli("run " + (dir / "missing.cfg").string()) == 2);
    }
}
#endif
