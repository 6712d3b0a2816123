#pragma once

// Explicit Runge-Kutta methods: starting procedures and relaxation RK references.

#include "relaxlmm/core.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace relaxlmm {

struct RelaxationConfig;
struct StepDiagnostics;

struct RkTableau {
    std::string name;
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    int p = 1;

    [[nodiscard]] int stages() const { return static_cast<int>(b.size()); }
    [[nodiscard]] bool is_explicit() const;
    /// Σb = 1 and c equal to the row sums of a.
    void validate() const;

    static RkTableau ssprk22();
    static RkTableau ssprk33();
    static RkTableau rk4();
};

const std::vector<RkTableau>& tableau_catalog();
RkTableau find_tableau(std::string_view name);

struct RkStep {
    StateVec u_new;
    std::vector<StateVec> stages;   // yⁱ
    std::vector<StateVec> stage_f;  // f(t + cᵢΔt, yⁱ)
};

RkStep rk_step(const RkTableau& tableau, const OdeProblem& problem, double t, const StateVec& u,
               double dt);

/// η(u) + Δt Σ bᵢ (η'f)(yⁱ), using the method's own quadrature.
double rk_eta_estimate(const RkTableau& tableau, const OdeProblem& problem, int fidx,
                       const StateVec& u, const RkStep& step, double dt);

struct RkRelaxed {
    double t = 0.0;
    StateVec u;
    double gamma = 1.0;
};

/// One relaxation RK step with m = 1 (base point (t, u)).
///
/// The target is η(u) for conserved functionals and the stage-quadrature
/// estimate otherwise. `cfg.mode` selects relaxation, IDT (time not
/// adapted), projection, or baseline.
RkRelaxed rk_relax_step(const RkTableau& tableau, const OdeProblem& problem, double t,
                        const StateVec& u, double dt, const RelaxationConfig& cfg,
                        StepDiagnostics* diag = nullptr);

}  // namespace relaxlmm
