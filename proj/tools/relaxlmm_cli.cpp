// relaxlmm: command line harness for runs, convergence studies and mode comparisons.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "relaxlmm/driver.hpp"
#include "relaxlmm/io.hpp"

#include <CLI11.hpp>
#include <boost/algorithm/string.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

using namespace relaxlmm;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

/// Flags shared by run/convergence/compare; each maps onto a settings key.
struct CommonFlags {
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    bool state = false;
    CLI::Option* state_opt = nullptr;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config, "INI configuration file (flags override it)")
            ->check(CLI::ExistingFile);
        const std::vector<std::pair<std::string, std::string>> flags{
            {"problem.name", "--problem"},
            {"problem.n", "--n"},
            {"problem.length", "--length"},
            {"problem.amplitude", "--amplitude"},
            {"problem.eps", "--eps"},
            {"problem.flux", "--flux"},
            {"problem.eccentricity", "--eccentricity"},
            {"problem.start", "--kepler-start"},
            {"problem.sigma", "--sigma"},
            {"method.name", "-M,--method"},
            {"method.starter", "--starter"},
            {"method.starter_method", "--starter-method"},
            {"method.starter_mode", "--starter-mode"},
            {"relaxation.mode", "--mode"},
            {"relaxation.estimator", "--estimator"},
            {"relaxation.m", "--m"},
            {"relaxation.nu", "--nu"},
            {"relaxation.gauss_nodes", "--gauss-nodes"},
            {"relaxation.coefficients", "--coefficients"},
            {"relaxation.target", "--target"},
            {"relaxation.gamma_offset", "--gamma-offset"},
            {"relaxation.root_tol", "--root-tol"},
            {"relaxation.newton_tol", "--newton-tol"},
            {"time.dt", "--dt"},
            {"time.t_final", "-T,--t-final"},
        };
        for (const auto& [key, flag] : flags) {
            options[key] = app->add_option(flag, values[key], "sets " + key);
        }
        state_opt = app->add_flag("--state", state, "include state columns in CSV output");
    }

    [[nodiscard]] RunConfig build() const {
        io::Settings settings;
        if (!config.empty()) settings = io::load_settings(config);
        for (const auto& [key, opt] : options) {
            if (opt->count() > 0) settings[key] = values.at(key);
        }
        if (state_opt->count() > 0) settings["output.state"] = state ? "true" : "false";
        RunConfig cfg;
        io::apply_settings(cfg, settings);
        cfg.validate();
        return cfg;
    }
};

void print_summary(const RunResult& r) {
    fmt::print(stderr, "{} / {} / {}: {} steps, t_N = {:.17g}\n", r.problem, r.method,
               to_string(r.mode), r.steps_taken(), r.t_last);
    if (!std::isnan(r.error)) fmt::print(stderr, "  error at t_N   = {:.6e}\n", r.error);
    fmt::print(stderr, "  max |gamma - 1| = {:.6e}\n", r.max_gamma_dev);
    for (std::size_t j = 0; j < r.functional_names.size(); ++j) {
        fmt::print(stderr, "  max drift {:<18} = {:.6e}\n", r.functional_names[j], r.max_drift[j]);
    }
    if (r.pseudotime) {
        fmt::print(stderr, "  |t - tau| = {:.6e}\n", std::abs(r.pseudotime->t - r.pseudotime->tau));
    }
}

std::string csv_name(const std::string& dir, const std::string& stem) {
    return (std::filesystem::path(dir) / (stem + ".csv")).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relaxation and projection for linear multistep and Runge-Kutta methods"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string run_out;
    auto* run_cmd = app.add_subcommand("run", "integrate one configuration and write its time series");
    run_flags.attach(run_cmd);
    run_cmd->add_option("-o,--output", run_out, "CSV file (default: stdout)");

    CommonFlags conv_flags;
    std::string conv_dir = ".";
    std::string conv_dts;
    int conv_levels = 4;
    auto* conv_cmd = app.add_subcommand("convergence", "error and EOC over successively halved dt");
    conv_flags.attach(conv_cmd);
    conv_cmd->add_option("--dts", conv_dts, "comma-separated step sizes (each half the previous)");
    conv_cmd->add_option("--levels", conv_levels, "number of halvings of --dt when --dts is absent")
        ->check(CLI::Range(3, 20));
    conv_cmd->add_option("-o,--output-dir", conv_dir, "directory for per-run CSVs and summary.csv");

    CommonFlags cmp_flags;
    std::string cmp_dir = ".";
    std::string cmp_modes = "baseline,projection,relaxation";
    auto* cmp_cmd = app.add_subcommand("compare", "same configuration under several modes");
    cmp_flags.attach(cmp_cmd);
    cmp_cmd->add_option("--modes", cmp_modes, "comma-separated modes");
    cmp_cmd->add_option("-o,--output-dir", cmp_dir, "directory for compare.csv and per-mode CSVs");

    auto* lm_cmd = app.add_subcommand("list-methods", "list multistep and Runge-Kutta methods");
    auto* lp_cmd = app.add_subcommand("list-problems", "list test problems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (lm_cmd->parsed()) {
            fmt::print("{:<10} {:<10} {:>2} {:>2}  {}\n", "name", "label", "k", "p", "kind");
            for (const auto& s : scheme_catalog()) {
                fmt::print("{:<10} {:<10} {:>2} {:>2}  {}{}\n", s.name, s.label, s.k, s.p,
                           s.is_explicit() ? "explicit LMM" : "implicit LMM",
                           s.nonnegative_alpha() ? ", nonnegative alpha" : "");
            }
            for (const auto& t : tableau_catalog()) {
                fmt::print("{:<10} {:<10} {:>2} {:>2}  explicit RK, {} stages\n", t.name, t.name, 1,
                           t.p, t.stages());
            }
            return 0;
        }
        if (lp_cmd->parsed()) {
            for (const auto& p : problems::problem_catalog()) {
                fmt::print("{:<22} {}\n", p.name, p.description);
            }
            return 0;
        }
        if (run_cmd->parsed()) {
            const RunConfig cfg = run_flags.build();
            const RunResult r = run(cfg);
            if (run_out.empty()) {
                io::write_run_csv(std::cout, r);
            } else {
                io::write_run_csv(run_out, r);
            }
            print_summary(r);
            return 0;
        }
        if (conv_cmd->parsed()) {
            const RunConfig cfg = conv_flags.build();
            std::vector<double> dts;
            if (!conv_dts.empty()) {
                dts = io::parse_list(conv_dts);
            } else {
                for (int i = 0; i < conv_levels; ++i) dts.push_back(cfg.dt / (1 << i));
            }
            std::filesystem::create_directories(conv_dir);
            const auto rows = convergence_study(cfg, dts, [&](std::size_t i, const RunResult& r) {
                io::write_run_csv(csv_name(conv_dir, fmt::format("run_{}", i)), r);
            });
            io::write_convergence_csv(csv_name(conv_dir, "summary"), rows);
            io::write_convergence_csv(std::cout, rows);
            return 0;
        }
        if (cmp_cmd->parsed()) {
            const RunConfig cfg = cmp_flags.build();
            std::vector<Mode> modes;
            std::vector<std::string> names;
            boost::algorithm::split(names, cmp_modes, boost::algorithm::is_any_of(","));
            for (const auto& n : names) modes.push_back(parse_mode(n));
            std::filesystem::create_directories(cmp_dir);
            const auto runs = compare_modes(cfg, modes);
            for (const auto& r : runs) {
                io::write_run_csv(csv_name(cmp_dir, std::string(to_string(r.mode))), r);
                print_summary(r);
            }
            io::write_compare_csv(csv_name(cmp_dir, "compare"), runs);
            return 0;
        }
    } catch (const ConfigError& e) {
        fmt::print(stderr, "configuration error: {}\n", e.what());
        return kConfigError;
    } catch (const NumericalError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return kNumericalError;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kNumericalError;
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(stderr, "output error: {}\n", e.what());
        return kConfigError;
    }
    return 0;
}
