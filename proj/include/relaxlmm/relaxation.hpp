#pragma once

// Relaxation update for arbitrary integrators.
//
// Given old values (t_old, u_old, η_old) formed from the history and a
// proposal (t_new, u_new, η_new), the accepted step is
//
//   (t, u, η)_γ = (t, u, η)_old + γ · ((t, u, η)_new - (t, u, η)_old)
//
// with γ ≈ 1 chosen so that η(u_γ) equals the η component of that line.

#include "relaxlmm/core.hpp"
#include "relaxlmm/lmm.hpp"
#include "relaxlmm/projection.hpp"
#include "relaxlmm/rootfind.hpp"

#include <limits>
#include <string_view>
#include <vector>

namespace relaxlmm {

enum class Mode { baseline, relaxation, idt, projection };
enum class Estimator { conserve, method_quadrature, dense_gauss };
enum class CoefficientMode { variable_coefficients, fixed_coefficients };

Mode parse_mode(std::string_view s);
Estimator parse_estimator(std::string_view s);
CoefficientMode parse_coefficient_mode(std::string_view s);
std::string_view to_string(Mode m);
std::string_view to_string(Estimator e);
std::string_view to_string(CoefficientMode c);

struct RelaxationConfig {
    Mode mode = Mode::relaxation;
    int m = 1;
    std::vector<double> nu{1.0};
    Estimator estimator = Estimator::conserve;
    int gauss_nodes = 1;
    CoefficientMode adapt = CoefficientMode::variable_coefficients;
    int target_fidx = 0;
    RootConfig root;
    ProjectionConfig projection;
    /// Subtracted from the solved γ; a positive value adds dissipation.
    double gamma_offset = 0.0;

    void validate() const;
};

struct StepDiagnostics {
    double gamma = 1.0;
    double bracket_width = 0.0;
    double residual = 0.0;
    double eta_estimate = std::numeric_limits<double>::quiet_NaN();
};

/// No admissible relaxation parameter for the attempted step size.
class StepTooLarge : public NumericalError {
public:
    StepTooLarge(const std::string& what, double dt) : NumericalError(what), dt_(dt) {}
    [[nodiscard]] double dt() const { return dt_; }

private:
    double dt_;
};

/// The method-quadrature estimate needs αᵢ, βᵢ ≥ 0.
class NegativeCoefficients : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// r(γ) = η(u_old + γ(u_new - u_old)) - η_old - γ(η_new - η_old).
double residual_r(double gamma, const StateVec& u_old, const StateVec& u_new, double eta_old,
                  double eta_new, const Functional& eta);

/// Root of r near 1: closed form for quadratic functionals, bracketed otherwise.
RootResult solve_relaxation_gamma(const Functional& eta, const StateVec& u_old,
                                  const StateVec& u_new, double eta_old, double eta_new,
                                  const RootConfig& cfg);

/// Σ (αᵢ η(u^{n-k+i}) + Δt βᵢ (η'f)(u^{n-k+i})) from cached history values.
///
/// Implicit schemes also need the new state and its rhs for the βₖ term.
double estimate_eta_method(const LmmCoefficients& coeffs, const StepHistory& history,
                           const OdeProblem& problem, int fidx,
                           const StateVec* u_new = nullptr, const StateVec* f_new = nullptr);

/// η_lo + Σ wᵢ (η'f)(y(τᵢ)) with Gauss-Legendre nodes on [t_lo, t_hi].
double estimate_eta_gauss(const OdeProblem& problem, int fidx, double eta_lo, double t_lo,
                          double t_hi, int nodes, const DenseOutput& dense);

/// Output of one integrator step, before relaxation.
struct Proposal {
    double t_new = 0.0;
    StateVec u_new;
    /// η_new for the target functional; ignored by the `conserve` estimator.
    double eta_new = std::numeric_limits<double>::quiet_NaN();
};

struct RelaxedStep {
    double t = 0.0;
    StateVec u;
    double gamma = 1.0;
    StepDiagnostics diag;
};

/// Apply `cfg.mode` to a proposal against explicit old values. Pure; no history update.
RelaxedStep relax_against(const OldValues& old, const Proposal& proposal,
                          const OdeProblem& problem, const RelaxationConfig& cfg, double dt);

/// Apply `cfg.mode` to a proposal and append the accepted state to `history`.
///
/// `dt` is the nominal step, used only for error reporting.
RelaxedStep relax_step(const Proposal& proposal, StepHistory& history, const OdeProblem& problem,
                       const RelaxationConfig& cfg, double dt);

/// Pseudotime bookkeeping for frozen-coefficient relaxation.
struct PseudotimeState {
    double tau = 0.0;
    double t = 0.0;
    double dtau = 0.0;
    /// max over steps of |(t_n - t_{n-1}) / Δτ - 1|.
    double max_scaling_dev = 0.0;
};

/// relax_step with fixed coefficients; advances τ by Δτ and tracks t - τ.
RelaxedStep pseudotime_step(const Proposal& proposal, StepHistory& history,
                            const OdeProblem& problem, const RelaxationConfig& cfg,
                            PseudotimeState& state);

}  // namespace relaxlmm
