#pragma once

// Integration driver: starts, the step loop, convergence studies, mode comparisons.

#include "relaxlmm/core.hpp"
#include "relaxlmm/lmm.hpp"
#include "relaxlmm/problems.hpp"
#include "relaxlmm/relaxation.hpp"
#include "relaxlmm/rk.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relaxlmm {

/// A multistep scheme or a one-step Runge-Kutta method, resolved by name.
struct Method {
    std::string name;
    std::optional<LmmScheme> lmm;
    std::optional<RkTableau> rk;

    [[nodiscard]] int k() const { return lmm ? lmm->k : 1; }
    [[nodiscard]] int p() const { return lmm ? lmm->p : rk->p; }
    [[nodiscard]] std::string label() const { return lmm ? lmm->label : rk->name; }
};

Method resolve_method(std::string_view name);

enum class StarterKind { automatic, exact, runge_kutta };

StarterKind parse_starter(std::string_view s);

struct RunConfig {
    std::string problem = "nonlinear_oscillator";
    problems::ProblemParams params;
    std::string method = "adams3";

    Mode mode = Mode::relaxation;
    int m = 1;
    std::vector<double> nu{1.0};
    /// Unset: `conserve` for conserved targets, else `method` when the
    /// scheme's coefficients are non-negative and `gauss` otherwise.
    std::optional<Estimator> estimator;
    /// Unset: 1 node for k ≤ 2, 2 nodes otherwise.
    std::optional<int> gauss_nodes;
    CoefficientMode coefficients = CoefficientMode::variable_coefficients;
    int target_fidx = 0;
    double gamma_offset = 0.0;
    RootConfig root;
    ProjectionConfig projection;
    NewtonConfig newton;

    double dt = 0.01;
    double t_final = 1.0;

    /// `automatic` uses the exact solution when the problem has one that
    /// solves its ODEs (not a sampled PDE solution).
    StarterKind starter = StarterKind::automatic;
    std::string starter_method = "ssprk33";
    /// Mode of the Runge-Kutta start; unset means the run's own mode.
    std::optional<Mode> starter_mode;

    bool record_state = false;

    /// Checks that do not need the problem instance.
    void validate() const;
};

/// RelaxationConfig for `cfg` with the automatic choices resolved.
RelaxationConfig resolve_relaxation(const RunConfig& cfg, const OdeProblem& problem,
                                    const Method& method);

struct StepRecord {
    double t = 0.0;
    double gamma = 1.0;
    std::vector<double> eta;
    StateVec u;  // empty unless RunConfig::record_state
    bool starter = false;
    /// Pseudotime for fixed-coefficient runs; NaN otherwise.
    double tau = std::numeric_limits<double>::quiet_NaN();
    StepDiagnostics diag;
};

struct RunResult {
    std::string problem;
    std::string method;
    Mode mode = Mode::relaxation;
    std::vector<std::string> functional_names;
    /// Index 0 is the initial state.
    std::vector<StepRecord> steps;
    /// Last accepted step (t_N ≥ T).
    double t_last = 0.0;
    StateVec u_last;
    /// u(T) by dense output over the last steps.
    StateVec u_at_final;
    /// ‖u_N - u(t_N)‖₂ against the exact solution; NaN without one.
    double error = std::numeric_limits<double>::quiet_NaN();
    /// ‖u_at_final - u(T)‖₂; NaN without an exact solution.
    double error_at_final = std::numeric_limits<double>::quiet_NaN();
    /// max |γ - 1| over the multistep (non-starter) steps.
    double max_gamma_dev = 0.0;
    /// max over steps of |η_n - η_0| per functional.
    std::vector<double> max_drift;
    std::optional<PseudotimeState> pseudotime;

    [[nodiscard]] int steps_taken() const { return static_cast<int>(steps.size()) - 1; }
};

/// Integrate until t ≥ T. StepTooLarge messages carry the failing step index.
RunResult run(const RunConfig& cfg);
RunResult run(const RunConfig& cfg, const OdeProblem& problem);

struct ConvergenceRow {
    double dt = 0.0;
    double error = std::numeric_limits<double>::quiet_NaN();
    /// log(e_{i-1}/e_i) / log(Δt_{i-1}/Δt_i); NaN on the first row.
    double eoc = std::numeric_limits<double>::quiet_NaN();
    double max_gamma_dev = std::numeric_limits<double>::quiet_NaN();
    int steps = 0;
    /// Empty on success, otherwise the failure message.
    std::string failure;
};

/// One run per Δt (each half of the previous, at least three). Errors use the
/// exact solution, or a run at min(Δt)/16 when the problem has none or
/// its exact solution samples a PDE.
/// A failed run is recorded in its row and does not abort the study.
/// `on_run` sees each successful run, e.g. to export it.
std::vector<ConvergenceRow> convergence_study(
    const RunConfig& cfg, const std::vector<double>& dts,
    const std::function<void(std::size_t, const RunResult&)>& on_run = {});

/// Least-squares slope of log y against log x over finite positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs `cfg` once per mode with identical starting values.
std::vector<RunResult> compare_modes(const RunConfig& cfg, const std::vector<Mode>& modes = {
                                                               Mode::baseline, Mode::projection,
                                                               Mode::relaxation});

}  // namespace relaxlmm
