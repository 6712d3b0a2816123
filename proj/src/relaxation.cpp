#include "relaxlmm/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace relaxlmm {

Mode parse_mode(std::string_view s) {
    if (s == "baseline") return Mode::baseline;
    if (s == "relaxation") return Mode::relaxation;
    if (s == "idt") return Mode::idt;
    if (s == "projection") return Mode::projection;
    throw ConfigError("unknown mode '" + std::string(s) + "'");
}

Estimator parse_estimator(std::string_view s) {
    if (s == "conserve") return Estimator::conserve;
    if (s == "method" || s == "method_quadrature") return Estimator::method_quadrature;
    if (s == "gauss" || s == "dense_gauss") return Estimator::dense_gauss;
    throw ConfigError("unknown estimator '" + std::string(s) + "'");
}

CoefficientMode parse_coefficient_mode(std::string_view s) {
    if (s == "variable" || s == "variable_coefficients") return CoefficientMode::variable_coefficients;
    if (s == "fixed" || s == "fixed_coefficients") return CoefficientMode::fixed_coefficients;
    throw ConfigError("unknown coefficient mode '" + std::string(s) + "'");
}

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::baseline: return "baseline";
        case Mode::relaxation: return "relaxation";
        case Mode::idt: return "idt";
        case Mode::projection: return "projection";
    }
    return "?";
}

std::string_view to_string(Estimator e) {
    switch (e) {
        case Estimator::conserve: return "conserve";
        case Estimator::method_quadrature: return "method";
        case Estimator::dense_gauss: return "gauss";
    }
    return "?";
}

std::string_view to_string(CoefficientMode c) {
    return c == CoefficientMode::fixed_coefficients ? "fixed" : "variable";
}

void RelaxationConfig::validate() const {
    if (m < 1) throw ConfigError("RelaxationConfig: m must be at least 1");
    if (nu.size() != static_cast<std::size_t>(m)) {
        throw ConfigError("RelaxationConfig: nu must have m entries");
    }
    for (double w : nu) {
        if (!(w >= 0.0)) throw ConfigError("RelaxationConfig: nu must be non-negative");
    }
    if (std::abs(std::accumulate(nu.begin(), nu.end(), 0.0) - 1.0) > 1e-12) {
        throw ConfigError("RelaxationConfig: nu must sum to one");
    }
    if (gauss_nodes != 1 && gauss_nodes != 2) {
        throw ConfigError("RelaxationConfig: gauss_nodes must be 1 or 2");
    }
    if (target_fidx < 0) throw ConfigError("RelaxationConfig: target_fidx must be non-negative");
    root.validate();
    projection.validate();
}

double residual_r(double gamma, const StateVec& u_old, const StateVec& u_new, double eta_old,
                  double eta_new, const Functional& eta) {
    return eta.eval(u_old + gamma * (u_new - u_old)) - eta_old - gamma * (eta_new - eta_old);
}

RootResult solve_relaxation_gamma(const Functional& eta, const StateVec& u_old,
                                  const StateVec& u_new, double eta_old, double eta_new,
                                  const RootConfig& cfg) {
    const StateVec d = u_new - u_old;
    if (d.isZero(0.0)) {
        return {1.0, 0.0, 0.0, 0};
    }
    if (eta.kind == FunctionalKind::quadratic_norm) {
        const double a = eta.eval(u_old) - eta_old;
        const double b = eta.deriv_dot(u_old, d) - eta_new + eta_old;
        const double c = eta.eval(d);
        const double gamma = solve_gamma_quadratic(a, b, c);
        return {gamma, 0.0, residual_r(gamma, u_old, u_new, eta_old, eta_new, eta), 0};
    }
    const auto r = [&](double g) { return residual_r(g, u_old, u_new, eta_old, eta_new, eta); };
    // If the step already meets the target to within a few ulps, r is pure
    // rounding noise on [0, 1] and any "root" found there is meaningless.
    const double r1 = r(1.0);
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max({std::abs(eta_old), std::abs(eta_new), std::abs(eta.eval(u_new))});
    if (std::abs(r1) <= noise) {
        return {1.0, 0.0, r1, 0};
    }
    // With r(0) ≈ 0 and no curvature above rounding level, the only
    // resolvable root is the trivial γ = 0: η is numerically affine along the
    // step, so rescaling cannot correct it. Keep the unrelaxed step.
    const double r0 = r(0.0);
    if (std::abs(r0) <= noise && std::abs(r(0.5) - 0.5 * (r0 + r1)) <= noise) {
        return {1.0, 0.0, r1, 0};
    }
    return solve_bracketed(r, 1.0, cfg);
}

double estimate_eta_method(const LmmCoefficients& coeffs, const StepHistory& history,
                           const OdeProblem& problem, int fidx, const StateVec* u_new,
                           const StateVec* f_new) {
    if (!coeffs.all_nonnegative()) {
        throw NegativeCoefficients("estimate_eta_method: coefficients must be non-negative");
    }
    const auto& fn = problem.functional(fidx);
    const auto entries = history.last(static_cast<std::size_t>(coeffs.k()));
    double out = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = *entries[i];
        if (coeffs.alpha[i] != 0.0) out += coeffs.alpha[i] * e.eta[static_cast<std::size_t>(fidx)];
        if (coeffs.beta[i] != 0.0) out += coeffs.dt_ref * coeffs.beta[i] * fn.deriv_dot(e.u, e.f);
    }
    if (!coeffs.is_explicit()) {
        if (u_new == nullptr || f_new == nullptr) {
            throw ConfigError("estimate_eta_method: implicit scheme needs the new state");
        }
        out += coeffs.dt_ref * coeffs.beta.back() * fn.deriv_dot(*u_new, *f_new);
    }
    return out;
}

double estimate_eta_gauss(const OdeProblem& problem, int fidx, double eta_lo, double t_lo,
                          double t_hi, int nodes, const DenseOutput& dense) {
    const double len = t_hi - t_lo;
    const double mid = 0.5 * (t_lo + t_hi);
    const auto rate = [&](double tau) { return eta_dot(problem, fidx, tau, dense(tau)); };
    switch (nodes) {
        case 1:
            return eta_lo + len * rate(mid);
        case 2: {
            const double off = len / (2.0 * std::sqrt(3.0));
            return eta_lo + 0.5 * len * (rate(mid - off) + rate(mid + off));
        }
        default:
            throw ConfigError("estimate_eta_gauss: nodes must be 1 or 2");
    }
}

RelaxedStep relax_against(const OldValues& old, const Proposal& proposal,
                          const OdeProblem& problem, const RelaxationConfig& cfg, double dt) {
    RelaxedStep out;
    out.t = proposal.t_new;
    out.u = proposal.u_new;
    if (cfg.mode == Mode::baseline) {
        return out;
    }

    const auto fidx = static_cast<std::size_t>(cfg.target_fidx);
    const Functional& fn = problem.functional(cfg.target_fidx);
    const double eta_old = old.eta.at(fidx);
    const double eta_new = cfg.estimator == Estimator::conserve ? eta_old : proposal.eta_new;
    if (!std::isfinite(eta_new)) {
        throw ConfigError("relax_step: estimator requires a finite eta_new");
    }
    out.diag.eta_estimate = eta_new;

    if (cfg.mode == Mode::projection) {
        const Projected pr = project(proposal.u_new, eta_new, fn, cfg.projection);
        out.u = pr.u;
        out.diag.residual = fn.eval(pr.u) - eta_new;
        return out;
    }

    RootResult root;
    try {
        root = solve_relaxation_gamma(fn, old.u, proposal.u_new, eta_old, eta_new, cfg.root);
    } catch (const NumericalError& e) {
        throw StepTooLarge(std::string("no relaxation parameter (") + e.what() + ")", dt);
    }
    const double gamma = root.x - cfg.gamma_offset;
    if (!(gamma > 0.0)) {
        throw StepTooLarge("relaxation parameter " + std::to_string(gamma) + " is not positive", dt);
    }
    out.gamma = gamma;
    out.diag.gamma = gamma;
    out.diag.bracket_width = root.bracket_width;
    out.diag.residual = root.residual;
    out.u = old.u + gamma * (proposal.u_new - old.u);
    if (cfg.mode == Mode::relaxation) {
        out.t = old.t + gamma * (proposal.t_new - old.t);
    }
    return out;
}

RelaxedStep relax_step(const Proposal& proposal, StepHistory& history, const OdeProblem& problem,
                       const RelaxationConfig& cfg, double dt) {
    cfg.validate();
    RelaxedStep out;
    if (cfg.mode == Mode::baseline) {
        out.t = proposal.t_new;
        out.u = proposal.u_new;
    } else {
        const OldValues old = old_values(history, cfg.m, cfg.nu);
        out = relax_against(old, proposal, problem, cfg, dt);
    }
    if (!(out.t > history.back().t)) {
        throw StepTooLarge("relaxed time does not advance", dt);
    }
    history.push(HistoryEntry::make(problem, out.t, out.u));
    return out;
}

RelaxedStep pseudotime_step(const Proposal& proposal, StepHistory& history,
                            const OdeProblem& problem, const RelaxationConfig& cfg,
                            PseudotimeState& state) {
    if (cfg.adapt != CoefficientMode::fixed_coefficients) {
        throw ConfigError("pseudotime_step: requires fixed coefficients");
    }
    RelaxedStep out = relax_step(proposal, history, problem, cfg, state.dtau);
    state.tau += state.dtau;
    state.max_scaling_dev =
        std::max(state.max_scaling_dev, std::abs((out.t - state.t) / state.dtau - 1.0));
    state.t = out.t;
    return out;
}

}  // namespace relaxlmm
