#include "relaxlmm/lmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace relaxlmm {

namespace {

std::vector<int> iota_vec(int first, int last_exclusive) {
    std::vector<int> v(static_cast<std::size_t>(std::max(0, last_exclusive - first)));
    std::iota(v.begin(), v.end(), first);
    return v;
}

void check_k(int k, int lo, int hi, const char* family) {
    if (k < lo || k > hi) {
        throw ConfigError(std::string(family) + ": k must be in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    }
}

// ℓ Ω^{ℓ-1} with the convention 0^0 = 1.
double dpow(double omega, int ell) {
    if (ell == 0) return 0.0;
    if (ell == 1) return 1.0;
    return ell * std::pow(omega, ell - 1);
}

double ipow(double omega, int ell) { return ell == 0 ? 1.0 : std::pow(omega, ell); }

constexpr double kResidualTol = 1e-11;

void check_residuals(const LmmCoefficients& c, const StepGrid& grid, int p, const std::string& what) {
    for (int ell = 0; ell <= p; ++ell) {
        const double res = order_condition(c, grid, ell);
        if (!(std::abs(res) <= kResidualTol)) {
            throw SingularSystem(what + ": order condition C_" + std::to_string(ell) +
                                 " residual " + std::to_string(res));
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Schemes
// ---------------------------------------------------------------------------

bool LmmScheme::is_explicit() const {
    return std::find(beta_pattern.begin(), beta_pattern.end(), k) == beta_pattern.end();
}

bool LmmScheme::nonnegative_alpha() const {
    const auto c = generate_coefficients(*this, uniform_grid(k), 1.0);
    return std::all_of(c.alpha.begin(), c.alpha.end(), [](double a) { return a >= 0.0; });
}

namespace schemes {

LmmScheme adams(int k) {
    check_k(k, 1, 6, "adams");
    return {"adams" + std::to_string(k), "Adams(" + std::to_string(k) + ")", LmmFamily::adams, k,
            k, {k - 1}, iota_vec(0, k)};
}

LmmScheme nystrom(int k) {
    check_k(k, 2, 6, "nystrom");
    return {"nystrom" + std::to_string(k), "Nystrom(" + std::to_string(k) + ")",
            LmmFamily::nystrom, k, k, {k - 2}, iota_vec(0, k)};
}

LmmScheme ebdf(int k) {
    check_k(k, 1, 6, "ebdf");
    // Pattern lists every nonzero; coefficients come from the BDF solve plus extrapolation.
    return {"ebdf" + std::to_string(k), "eBDF(" + std::to_string(k) + ")", LmmFamily::ebdf, k, k,
            iota_vec(0, k), iota_vec(0, k)};
}

LmmScheme bdf(int k) {
    check_k(k, 1, 6, "bdf");
    return {"bdf" + std::to_string(k), "BDF(" + std::to_string(k) + ")", LmmFamily::bdf, k, k,
            iota_vec(0, k), {k}};
}

LmmScheme ssp32() { return {"ssp32", "SSP(3,2)", LmmFamily::ssp, 3, 2, {0, 2}, {2}}; }

LmmScheme ssp43() { return {"ssp43", "SSP(4,3)", LmmFamily::ssp, 4, 3, {0, 3}, {0, 3}}; }

}  // namespace schemes

const std::vector<LmmScheme>& scheme_catalog() {
    static const std::vector<LmmScheme> catalog = [] {
        std::vector<LmmScheme> v;
        for (int k = 2; k <= 4; ++k) v.push_back(schemes::adams(k));
        for (int k = 2; k <= 4; ++k) v.push_back(schemes::nystrom(k));
        for (int k = 2; k <= 4; ++k) v.push_back(schemes::ebdf(k));
        for (int k = 1; k <= 4; ++k) v.push_back(schemes::bdf(k));
        v.push_back(schemes::ssp32());
        v.push_back(schemes::ssp43());
        return v;
    }();
    return catalog;
}

LmmScheme find_scheme(std::string_view name) {
    for (const auto& s : scheme_catalog()) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown multistep scheme '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Grids and coefficients
// ---------------------------------------------------------------------------

StepGrid make_grid(const StepHistory& history, int k, double t_new, double dt_ref) {
    if (k < 1 || static_cast<std::size_t>(k) > history.size()) {
        throw Error("make_grid: history holds " + std::to_string(history.size()) +
                    " entries, need " + std::to_string(k));
    }
    if (!(dt_ref > 0.0)) throw ConfigError("make_grid: dt_ref must be positive");
    if (!(t_new > history.back().t)) throw Error("make_grid: t_new must exceed the last time");

    const auto entries = history.last(static_cast<std::size_t>(k));
    const double t0 = entries.front()->t;
    StepGrid grid;
    grid.omega.reserve(static_cast<std::size_t>(k) + 1);
    for (const auto* e : entries) grid.omega.push_back((e->t - t0) / dt_ref);
    grid.omega.push_back((t_new - t0) / dt_ref);
    return grid;
}

StepGrid uniform_grid(int k) {
    StepGrid grid;
    for (int j = 0; j <= k; ++j) grid.omega.push_back(static_cast<double>(j));
    return grid;
}

bool LmmCoefficients::all_nonnegative() const {
    return std::all_of(alpha.begin(), alpha.end(), [](double a) { return a >= 0.0; }) &&
           std::all_of(beta.begin(), beta.end(), [](double b) { return b >= 0.0; });
}

double order_condition(const LmmCoefficients& coeffs, const StepGrid& grid, int ell) {
    const int k = coeffs.k();
    if (grid.k() != k) throw ConfigError("order_condition: grid and coefficients differ in k");
    if (ell == 0) {
        return std::accumulate(coeffs.alpha.begin(), coeffs.alpha.end(), 0.0) - 1.0;
    }
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
        const double om = grid.omega[static_cast<std::size_t>(j)];
        sum += ipow(om, ell) * coeffs.alpha[static_cast<std::size_t>(j)] +
               dpow(om, ell) * coeffs.beta[static_cast<std::size_t>(j)];
    }
    const double omk = grid.omega[static_cast<std::size_t>(k)];
    sum += dpow(omk, ell) * coeffs.beta[static_cast<std::size_t>(k)];
    return sum - ipow(omk, ell);
}

LmmCoefficients solve_order_conditions(const LmmScheme& scheme, const StepGrid& grid, int p,
                                       double dt_ref) {
    const int k = scheme.k;
    if (grid.k() != k) throw ConfigError("solve_order_conditions: grid size does not match k");
    const int na = static_cast<int>(scheme.alpha_pattern.size());
    const int nb = static_cast<int>(scheme.beta_pattern.size());
    if (na + nb != p + 1) {
        throw ConfigError("solve_order_conditions: " + scheme.name + " has " +
                          std::to_string(na + nb) + " unknowns, order " + std::to_string(p) +
                          " needs " + std::to_string(p + 1));
    }
    for (std::size_t j = 1; j < grid.omega.size(); ++j) {
        if (!(grid.omega[j] > grid.omega[j - 1])) {
            throw SingularSystem("solve_order_conditions: grid nodes not strictly increasing");
        }
    }

    const int n = p + 1;
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd rhs(n);
    const double omk = grid.omega.back();
    for (int ell = 0; ell < n; ++ell) {
        for (int c = 0; c < na; ++c) {
            const double om = grid.omega[static_cast<std::size_t>(scheme.alpha_pattern[static_cast<std::size_t>(c)])];
            a(ell, c) = ipow(om, ell);
        }
        for (int c = 0; c < nb; ++c) {
            const double om = grid.omega[static_cast<std::size_t>(scheme.beta_pattern[static_cast<std::size_t>(c)])];
            a(ell, na + c) = dpow(om, ell);
        }
        rhs(ell) = ipow(omk, ell);
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (!(lu.rcond() > 1e-14)) {
        throw SingularSystem("solve_order_conditions: singular system for " + scheme.name);
    }
    const Eigen::VectorXd x = lu.solve(rhs);

    LmmCoefficients out;
    out.alpha.assign(static_cast<std::size_t>(k), 0.0);
    out.beta.assign(static_cast<std::size_t>(k) + 1, 0.0);
    out.dt_ref = dt_ref;
    for (int c = 0; c < na; ++c) out.alpha[static_cast<std::size_t>(scheme.alpha_pattern[static_cast<std::size_t>(c)])] = x(c);
    for (int c = 0; c < nb; ++c) out.beta[static_cast<std::size_t>(scheme.beta_pattern[static_cast<std::size_t>(c)])] = x(na + c);
    check_residuals(out, grid, p, scheme.name);
    return out;
}

LmmCoefficients generate_coefficients(const LmmScheme& scheme, const StepGrid& grid, double dt_ref) {
    if (scheme.family != LmmFamily::ebdf) {
        return solve_order_conditions(scheme, grid, scheme.p, dt_ref);
    }

    // P_u'(t_new) = P_f(t_new): BDF weights with f(t_new) replaced by the
    // extrapolation of the k old f values.
    const int k = scheme.k;
    LmmCoefficients c = solve_order_conditions(schemes::bdf(k), grid, k, dt_ref);
    const double bk = c.beta[static_cast<std::size_t>(k)];
    const double x = grid.omega.back();
    for (int j = 0; j < k; ++j) {
        double w = 1.0;
        const double xj = grid.omega[static_cast<std::size_t>(j)];
        for (int i = 0; i < k; ++i) {
            if (i == j) continue;
            const double xi = grid.omega[static_cast<std::size_t>(i)];
            w *= (x - xi) / (xj - xi);
        }
        c.beta[static_cast<std::size_t>(j)] = bk * w;
    }
    c.beta[static_cast<std::size_t>(k)] = 0.0;
    check_residuals(c, grid, scheme.p, scheme.name);
    return c;
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

namespace {

StateVec explicit_part(const LmmCoefficients& coeffs, const StepHistory& history) {
    const int k = coeffs.k();
    const auto entries = history.last(static_cast<std::size_t>(k));
    StateVec out = StateVec::Zero(entries.front()->u.size());
    for (int i = 0; i < k; ++i) {
        const auto& e = *entries[static_cast<std::size_t>(i)];
        const double a = coeffs.alpha[static_cast<std::size_t>(i)];
        const double b = coeffs.beta[static_cast<std::size_t>(i)];
        if (a != 0.0) out += a * e.u;
        if (b != 0.0) out += (coeffs.dt_ref * b) * e.f;
    }
    return out;
}

Eigen::MatrixXd fd_jacobian(const OdeProblem& problem, double t, const StateVec& u,
                            const StateVec& f0) {
    const Eigen::Index n = u.size();
    Eigen::MatrixXd jac(n, n);
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    StateVec up = u;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = sqrt_eps * (1.0 + std::abs(u[j]));
        up[j] = u[j] + h;
        jac.col(j) = (problem.f(t, up) - f0) / h;
        up[j] = u[j];
    }
    return jac;
}

}  // namespace

StateVec lmm_step_explicit(const LmmCoefficients& coeffs, const StepHistory& history,
                           const OdeProblem&) {
    if (!coeffs.is_explicit()) throw ConfigError("lmm_step_explicit: beta_k must be zero");
    StateVec out = explicit_part(coeffs, history);
    if (!out.allFinite()) throw NonFinite("lmm_step_explicit: non-finite result");
    return out;
}

StateVec lmm_step_implicit(const LmmCoefficients& coeffs, const StepHistory& history,
                           const OdeProblem& problem, double t_new, const NewtonConfig& cfg) {
    const double bk = coeffs.beta.back();
    if (bk == 0.0) throw ConfigError("lmm_step_implicit: beta_k must be nonzero");
    const StateVec rest = explicit_part(coeffs, history);
    const double scale = coeffs.dt_ref * bk;

    StateVec u = rest + scale * history.back().f;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    bool have_jacobian = false;
    // Past the tolerance, keep iterating while the residual still drops so the
    // result sits at roundoff level; relaxation downstream is sensitive to it.
    bool converged = false;
    StateVec best;
    double best_res = std::numeric_limits<double>::infinity();
    int polish = 0;
    for (int iter = 0; iter <= cfg.max_iter; ++iter) {
        const StateVec fu = problem.f(t_new, u);
        const StateVec g = u - scale * fu - rest;
        const double res = g.lpNorm<Eigen::Infinity>();
        if (converged && (res >= best_res || ++polish > 2)) {
            return res < best_res ? u : best;
        }
        if (res < best_res) {
            best_res = res;
            best = u;
        }
        if (res == 0.0) return u;
        if (res <= cfg.tol) converged = true;
        if (iter == cfg.max_iter) break;
        if (!have_jacobian || !cfg.reuse_jacobian) {
            Eigen::MatrixXd jac = -scale * fd_jacobian(problem, t_new, u, fu);
            jac.diagonal().array() += 1.0;
            lu.compute(jac);
            have_jacobian = true;
        }
        u -= lu.solve(g);
        if (!u.allFinite()) break;
    }
    if (converged) return best;
    throw NewtonDiverged("lmm_step_implicit: Newton did not converge at t=" + std::to_string(t_new));
}

// ---------------------------------------------------------------------------
// Dense output
// ---------------------------------------------------------------------------

DenseOutput::DenseOutput(const StepHistory& history, int k, double t_end,
                         std::optional<std::pair<double, StateVec>> extra) {
    const auto entries = history.last(static_cast<std::size_t>(k));
    std::vector<double> ts;
    std::vector<StateVec> fs;
    for (const auto* e : entries) {
        ts.push_back(e->t);
        fs.push_back(e->f);
    }
    if (extra) {
        ts.push_back(extra->first);
        fs.push_back(extra->second);
    }
    t_anchor_ = history.back().t;
    u_anchor_ = history.back().u;
    t_min_ = ts.front();
    t_max_ = std::max({t_end, t_anchor_, ts.back()});
    scale_ = ts.size() > 1 ? ts.back() - ts.front() : 1.0;

    const std::size_t n = ts.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (ts[i] - t_anchor_) / scale_;

    // Divided differences, in place.
    std::vector<StateVec> dd = fs;
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = n - 1; i >= level; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - level]);
        }
    }

    // Expand the Newton form into monomials in x.
    const Eigen::Index dim = u_anchor_.size();
    monomial_.assign(n, StateVec::Zero(dim));
    std::vector<double> basis{1.0};  // coefficients of Π_{i<j}(x - x_i)
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t m = 0; m < basis.size(); ++m) {
            if (basis[m] != 0.0) monomial_[m] += basis[m] * dd[j];
        }
        std::vector<double> next(basis.size() + 1, 0.0);
        for (std::size_t m = 0; m < basis.size(); ++m) {
            next[m + 1] += basis[m];
            next[m] -= x[j] * basis[m];
        }
        basis = std::move(next);
    }
}

StateVec DenseOutput::operator()(double tau) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(t_max_));
    if (tau < t_min_ - slack || tau > t_max_ + slack) {
        throw Error("dense_output: tau=" + std::to_string(tau) + " outside [" +
                    std::to_string(t_min_) + ", " + std::to_string(t_max_) + "]");
    }
    const double x = (tau - t_anchor_) / scale_;
    StateVec out = u_anchor_;
    double xp = x;
    for (std::size_t m = 0; m < monomial_.size(); ++m) {
        out += (scale_ * xp / static_cast<double>(m + 1)) * monomial_[m];
        xp *= x;
    }
    return out;
}

StateVec dense_output(const StepHistory& history, int k, double tau, double t_end,
                      std::optional<std::pair<double, StateVec>> extra) {
    return DenseOutput(history, k, t_end, std::move(extra))(tau);
}

}  // namespace relaxlmm
