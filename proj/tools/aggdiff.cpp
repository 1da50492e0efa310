// aggdiff command line: `aggdiff run <config> [--out DIR] [--sweep K=v1,v2,...]`
// executes one experiment (or a parallel sweep over one key), `aggdiff check`
// runs the built-in oracle suite. Exit codes: 0 ok, 2 config/parse error,
// 3 numerical blow-up, 4 precondition failure, 5 i/o error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aggdiff/aggdiff.hpp"

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_single(const std::string& text) {
    aggdiff::ExperimentConfig cfg;
    try {
        cfg = aggdiff::parse_config(text);
    } catch (const aggdiff::parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(aggdiff::ExitCode::parse);
    }
    const aggdiff::ExperimentResult result = aggdiff::run_experiment(cfg);
    if (result.code == aggdiff::ExitCode::ok) {
        std::cout << "wrote " << cfg.out_dir << " (" << result.records.size() << " output times)\n";
    } else {
        std::cerr << "experiment failed: " << result.message << "\n";
    }
    return static_cast<int>(result.code);
}

struct SweepSpec {
    std::string key;
    std::vector<std::string> values;
};

SweepSpec parse_sweep(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::runtime_error("--sweep expects KEY=v1,v2,...");
    SweepSpec s;
    s.key = arg.substr(0, eq);
    std::istringstream ss(arg.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) s.values.push_back(item);
    if (s.values.empty()) throw std::runtime_error("--sweep got an empty value list");
    return s;
}

int run_sweep(const std::string& text, const SweepSpec& sweep, const std::string& out_base) {
    std::vector<int> codes(sweep.values.size(), 0);
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        workers.emplace_back([&, i] {
            const std::string dir =
                (std::filesystem::path(out_base) / (sweep.key + "=" + sweep.values[i])).string();
            std::string variant = text;
            variant += "\n[]\n";  // reset any open section before the overrides
            variant += sweep.key + " = " + sweep.values[i] + "\n";
            variant += "out_dir = " + dir + "\n";
            try {
                const auto cfg = aggdiff::parse_config(variant);
                codes[i] = static_cast<int>(aggdiff::run_experiment(cfg).code);
            } catch (const aggdiff::parse_error& e) {
                std::cerr << "sweep value '" << sweep.values[i] << "': " << e.what() << "\n";
                codes[i] = static_cast<int>(aggdiff::ExitCode::parse);
            }
        });
    }
    for (auto& w : workers) w.join();
    int worst = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        std::cout << sweep.key << " = " << sweep.values[i] << ": exit " << codes[i] << "\n";
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aggdiff: numerical laboratory for u_t = u_xx - (u (K'*u))_x"};
    app.require_subcommand(1);

    std::string config_path, out_dir, sweep_arg;
    CLI::App* cmd_run = app.add_subcommand("run", "run an experiment from a config file");
    cmd_run->add_option("config", config_path, "configuration file")->required();
    cmd_run->add_option("--out", out_dir, "override the output directory");
    cmd_run->add_option("--sweep", sweep_arg, "sweep one key: KEY=v1,v2,...");

    CLI::App* cmd_check = app.add_subcommand("check", "run the built-in oracle suite");

    CLI11_PARSE(app, argc, argv);

    if (cmd_check->parsed()) {
        const int failures = aggdiff::run_check_suite(std::cout);
        std::cout << (failures == 0 ? "all checks passed" : "CHECKS FAILED") << "\n";
        return failures == 0 ? 0 : 1;
    }

    try {
        std::string text = read_text_file(config_path);
        if (!sweep_arg.empty()) {
            const SweepSpec sweep = parse_sweep(sweep_arg);
            const std::string base = out_dir.empty() ? "sweep" : out_dir;
            return run_sweep(text, sweep, base);
        }
        if (!out_dir.empty()) text += "\n[]\nout_dir = " + out_dir + "\n";
        return run_single(text);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return static_cast<int>(aggdiff::ExitCode::parse);
    }
}
