#pragma once

// Configuration files and CSV export for the driver.

#include "relaxlmm/driver.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace relaxlmm::io {

/// Flat "section.key" -> value settings.
using Settings = std::map<std::string, std::string>;

/// Read an INI-style file (`[section]` headers, `key = value` lines).
Settings load_settings(const std::string& path);

/// Apply settings on top of `cfg`. Unknown keys are a ConfigError.
///
/// Recognized keys:
///   problem.name, problem.n, problem.length, problem.amplitude, problem.eps,
///   problem.flux, problem.eccentricity, problem.start, problem.sigma,
///   method.name, method.starter, method.starter_method, method.starter_mode,
///   relaxation.mode, relaxation.estimator, relaxation.m, relaxation.nu,
///   relaxation.gauss_nodes, relaxation.coefficients, relaxation.target,
///   relaxation.gamma_offset, relaxation.root_tol, relaxation.newton_tol,
///   time.dt, time.t_final, output.state
void apply_settings(RunConfig& cfg, const Settings& settings);

std::vector<double> parse_list(const std::string& text);

/// One row per accepted step: t, tau (fixed-coefficient runs), gamma, eta_0.., then u_0..
/// when states were recorded.
void write_run_csv(std::ostream& os, const RunResult& result);
void write_run_csv(const std::string& path, const RunResult& result);

/// dt, error, eoc, max_gamma_dev, steps, status.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

/// Runs joined by step index: step, then t/gamma/eta_j per mode.
void write_compare_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_compare_csv(const std::string& path, const std::vector<RunResult>& runs);

}  // namespace relaxlmm::io
