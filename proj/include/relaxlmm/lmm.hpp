#pragma once

// Linear multistep methods on variable step grids.
//
// Every scheme is written as
//
//   u_new = Σ_{i<k} αᵢ u^{n-k+i} + Δt Σ_{i≤k} βᵢ f^{n-k+i},
//
// and its coefficients are generated from the order conditions on the
// normalized grid Ω (Ω₀ = 0, Ω_k = (t_new - t^{n-k}) / Δt):
//
//   Σ αᵢ = 1,   Σ (Ωᵢ^ℓ αᵢ + ℓ Ωᵢ^{ℓ-1} βᵢ) = Ω_k^ℓ,   ℓ = 1..p,
//
// restricted to the scheme's nonzero pattern.

#include "relaxlmm/core.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relaxlmm {

enum class LmmFamily { adams, nystrom, ebdf, bdf, ssp };

struct LmmScheme {
    std::string name;   // "adams3"
    std::string label;  // "Adams(3)"
    LmmFamily family = LmmFamily::adams;
    int k = 1;
    int p = 1;
    std::vector<int> alpha_pattern;  // indices in [0, k)
    std::vector<int> beta_pattern;   // indices in [0, k]

    [[nodiscard]] bool is_explicit() const;
    /// Whether the uniform-grid α are all non-negative (needed for ν = α).
    [[nodiscard]] bool nonnegative_alpha() const;
};

namespace schemes {
LmmScheme adams(int k);
LmmScheme nystrom(int k);
LmmScheme ebdf(int k);
LmmScheme bdf(int k);
LmmScheme ssp32();
LmmScheme ssp43();
}  // namespace schemes

/// All built-in schemes.
const std::vector<LmmScheme>& scheme_catalog();
/// Lookup by `name`; throws ConfigError for unknown names.
LmmScheme find_scheme(std::string_view name);

class SingularSystem : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Normalized step-point grid Ω₀..Ω_k.
struct StepGrid {
    std::vector<double> omega;

    [[nodiscard]] int k() const { return static_cast<int>(omega.size()) - 1; }
};

StepGrid make_grid(const StepHistory& history, int k, double t_new, double dt_ref);
StepGrid uniform_grid(int k);

struct LmmCoefficients {
    std::vector<double> alpha;  // size k
    std::vector<double> beta;   // size k + 1
    double dt_ref = 1.0;

    [[nodiscard]] int k() const { return static_cast<int>(alpha.size()); }
    [[nodiscard]] bool is_explicit() const { return beta.back() == 0.0; }
    [[nodiscard]] bool all_nonnegative() const;
};

/// C_ℓ(α, β, Ω); C_0 = Σα - 1.
double order_condition(const LmmCoefficients& coeffs, const StepGrid& grid, int ell);

/// Solve C_0 = … = C_p = 0 on the scheme's pattern by dense LU with partial pivoting.
///
/// The pattern must hold exactly p + 1 unknowns. Residuals above 1e-11 are
/// reported as SingularSystem.
LmmCoefficients solve_order_conditions(const LmmScheme& scheme, const StepGrid& grid, int p,
                                       double dt_ref = 1.0);

/// Coefficients of `scheme` on `grid`, including families that are not a
/// pure pattern solve (eBDF = BDF weights with f extrapolated to t_new).
LmmCoefficients generate_coefficients(const LmmScheme& scheme, const StepGrid& grid,
                                      double dt_ref);

struct NewtonConfig {
    double tol = 1e-12;
    int max_iter = 50;
    /// Keep the first finite-difference Jacobian for the whole solve.
    bool reuse_jacobian = false;
};

/// Explicit update; requires β_k = 0 and k history entries.
StateVec lmm_step_explicit(const LmmCoefficients& coeffs, const StepHistory& history,
                           const OdeProblem& problem);

/// Implicit update solved by Newton with a finite-difference Jacobian.
StateVec lmm_step_implicit(const LmmCoefficients& coeffs, const StepHistory& history,
                           const OdeProblem& problem, double t_new,
                           const NewtonConfig& cfg = {});

/// y(τ) = u_a + ∫_{t_a}^{τ} P_f(s) ds, where (t_a, u_a) is the newest history
/// entry and P_f interpolates f at the newest k entries (plus an optional
/// extra node, e.g. the implicit new value). Valid for τ in
/// [t^{n-k}, max(t_end, t_a)].
class DenseOutput {
public:
    DenseOutput(const StepHistory& history, int k, double t_end,
                std::optional<std::pair<double, StateVec>> extra = std::nullopt);

    [[nodiscard]] StateVec operator()(double tau) const;
    [[nodiscard]] double t_min() const { return t_min_; }
    [[nodiscard]] double t_max() const { return t_max_; }

private:
    double t_anchor_;
    double scale_;
    StateVec u_anchor_;
    std::vector<StateVec> monomial_;  // P_f in powers of (t - t_anchor) / scale
    double t_min_;
    double t_max_;
};

StateVec dense_output(const StepHistory& history, int k, double tau, double t_end,
                      std::optional<std::pair<double, StateVec>> extra = std::nullopt);

}  // namespace relaxlmm
