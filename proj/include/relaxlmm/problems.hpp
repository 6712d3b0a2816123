#pragma once

// Test problems: ODEs with closed-form solutions and 1D method-of-lines
// semidiscretizations, each carrying the functionals it conserves or dissipates.

#include "relaxlmm/core.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace relaxlmm::problems {

enum class BurgersFlux { split, central };

BurgersFlux parse_burgers_flux(std::string_view s);

/// Kepler initial momentum at q = (1 - e, 0): `slow` is p₂ = √((1-e)/(1+e))
/// (H = -11/6 at e = 0.5), `standard` the periapsis speed p₂ = √((1+e)/(1-e)) (H = -1/2).
enum class KeplerStart { slow, standard };

KeplerStart parse_kepler_start(std::string_view s);

/// Constructor parameters; each problem reads only the fields it needs.
struct ProblemParams {
    int n = 0;                          // grid size; 0 picks the problem default
    double length = 80.0;               // KdV period
    double amplitude = 2.0;             // KdV soliton amplitude
    double eps = 0.05;                  // Burgers flux dissipation
    BurgersFlux flux = BurgersFlux::split;
    double eccentricity = 0.5;          // Kepler
    KeplerStart kepler_start = KeplerStart::slow;
    double sat_sigma = 1.0;             // advection inflow penalty
};

/// u' = ‖u‖⁻²(-u₂, u₁), exact (cos t, sin t).
OdeProblem nonlinear_oscillator();

/// Planar Kepler problem in (q₁, q₂, p₁, p₂) from q = (1 - e, 0); functionals H and L.
OdeProblem kepler(double e = 0.5, KeplerStart start = KeplerStart::slow);

/// u' = -exp(u), η = exp(u) dissipated.
OdeProblem exp_entropy();

/// u₁' = -exp(u₂), u₂' = exp(u₁), η = exp(u₁) + exp(u₂) conserved.
OdeProblem conserved_exponential();

/// u' = S u with the 3×3 cyclic skew matrix; energy and mass conserved.
OdeProblem skew3();

/// Periodic Burgers on [-1, 1] with a two-point flux.
OdeProblem burgers_fd(int n = 64, double eps = 0.05, BurgersFlux flux = BurgersFlux::split);

/// KdV u_t + u u_x + u_xxx = 0 by Fourier collocation, soliton initial data.
OdeProblem kdv_fourier(int n = 64, double length = 80.0, double amplitude = 2.0);

/// u_t + u_x = 0 on [0, 3] with inflow sin(πt) imposed by SAT.
OdeProblem advection_sbp(int n = 200, double sigma = 1.0);

/// Real Fourier differentiation matrix of order 1 or 3 on n equispaced
/// nodes over [0, length). Skew-symmetric; the Nyquist mode is dropped.
Eigen::MatrixXd fourier_diff_matrix(int n, double length, int order);

/// Second-order SBP pair (H diagonal, Q) on n nodes with spacing dx.
struct SbpOperator {
    Eigen::VectorXd h;
    Eigen::MatrixXd q;
};
SbpOperator sbp_central(int n, double dx);

struct ProblemInfo {
    std::string name;
    std::string description;
};

const std::vector<ProblemInfo>& problem_catalog();

/// Build a problem by name; throws ConfigError for unknown names.
OdeProblem make_problem(std::string_view name, const ProblemParams& params = {});

}  // namespace relaxlmm::problems
