#include "relaxlmm/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace relaxlmm;

TEST_CASE("settings files") {
    const auto path = std::filesystem::temp_directory_path() / "relaxlmm_test_settings.ini";
    {
        std::ofstream f(path);
        f << "[problem]\nname = kepler\nstart = standard\n\n[relaxation]\nm = 2\nestimator = gauss\n"
             "[time]\ndt = 0.05\nt_final = 3\n[output]\ndir = out\n";
    }
    const auto s = io::load_settings(path.string());
    CHECK(s.at("problem.name") == "kepler");
    RunConfig cfg;
    io::apply_settings(cfg, s);
    CHECK(cfg.problem == "kepler");
    CHECK(cfg.params.kepler_start == problems::KeplerStart::standard);
    CHECK(cfg.m == 2);
    CHECK(cfg.nu == std::vector<double>{0.5, 0.5});
    CHECK(cfg.estimator == Estimator::dense_gauss);
    CHECK(cfg.dt == 0.05);
    CHECK(cfg.t_final == 3.0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(io::load_settings(path.string()), ConfigError);
}

TEST_CASE("setting errors") {
    RunConfig cfg;
    CHECK_THROWS_AS(io::apply_settings(cfg, {{"time.dtt", "0.1"}}), ConfigError);
    CHECK_THROWS_AS(io::apply_settings(cfg, {{"time.dt", "0.1x"}}), ConfigError);
    CHECK_THROWS_AS(io::apply_settings(cfg, {{"relaxation.m", "1.5"}}), ConfigError);
    CHECK_THROWS_AS(io::apply_settings(cfg, {{"problem.start", "sideways"}}), ConfigError);
    CHECK_THROWS_AS(io::apply_settings(cfg, {{"output.state", "maybe"}}), ConfigError);
    io::apply_settings(cfg, {{"relaxation.nu", "0.25, 0.75"}, {"relaxation.m", "2"}});
    CHECK(cfg.nu == std::vector<double>{0.25, 0.75});
}

TEST_CASE("number lists") {
    CHECK(io::parse_list("0.1,0.05 0.025") == std::vector<double>{0.1, 0.05, 0.025});
    CHECK(io::parse_list("") .empty());
    CHECK_THROWS_AS(io::parse_list("1,a"), ConfigError);
}

TEST_CASE("CSV layouts") {
    RunConfig cfg;
    cfg.problem = "oscillator";
    cfg.dt = 0.25;
    cfg.t_final = 1.0;
    cfg.record_state = true;
    const auto r = run(cfg);
    std::ostringstream os;
    io::write_run_csv(os, r);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,gamma,eta_0,u_0,u_1");
    std::getline(in, line);
    CHECK(line == "0,1,0.5,1,0");
    int rows = 1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == static_cast<int>(r.steps.size()));

    RunConfig fixed;
    fixed.problem = "exp_entropy";
    fixed.method = "ssp43";
    fixed.coefficients = CoefficientMode::fixed_coefficients;
    fixed.dt = 0.05;
    fixed.t_final = 0.5;
    std::ostringstream fs;
    io::write_run_csv(fs, run(fixed));
    CHECK(fs.str().substr(0, fs.str().find('\n')) == "t,tau,gamma,eta_0");

    std::ostringstream cs;
    ConvergenceRow row;
    row.dt = 0.1;
    row.failure = "step 3: bad, worse";
    io::write_convergence_csv(cs, {row});
    CHECK(cs.str() == "dt,error,eoc,max_gamma_dev,steps,status\n0.10000000000000001,nan,nan,nan,0,step 3: bad; worse\n");

    std::ostringstream cmp;
    io::write_compare_csv(cmp, compare_modes(cfg, {Mode::baseline, Mode::relaxation}));
    CHECK(cmp.str().substr(0, cmp.str().find('\n')) ==
          "step,t_baseline,gamma_baseline,energy_baseline,t_relaxation,gamma_relaxation,energy_relaxation");
}
