#include "relaxlmm/rk.hpp"

#include "relaxlmm/relaxation.hpp"

#include <cmath>
#include <string>

namespace relaxlmm {

bool RkTableau::is_explicit() const {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i; j < a.cols(); ++j) {
            if (a(i, j) != 0.0) return false;
        }
    }
    return true;
}

void RkTableau::validate() const {
    const auto s = b.size();
    if (a.rows() != s || a.cols() != s || c.size() != s) {
        throw ConfigError("RkTableau " + name + ": inconsistent sizes");
    }
    if (std::abs(b.sum() - 1.0) > 1e-14) throw ConfigError("RkTableau " + name + ": sum(b) != 1");
    const Eigen::VectorXd rows = a.rowwise().sum();
    if ((rows - c).cwiseAbs().maxCoeff() > 1e-14) {
        throw ConfigError("RkTableau " + name + ": c differs from row sums of a");
    }
}

RkTableau RkTableau::ssprk22() {
    RkTableau t;
    t.name = "ssprk22";
    t.p = 2;
    t.a = Eigen::MatrixXd::Zero(2, 2);
    t.a(1, 0) = 1.0;
    t.b = Eigen::Vector2d(0.5, 0.5);
    t.c = Eigen::Vector2d(0.0, 1.0);
    return t;
}

RkTableau RkTableau::ssprk33() {
    RkTableau t;
    t.name = "ssprk33";
    t.p = 3;
    t.a = Eigen::MatrixXd::Zero(3, 3);
    t.a(1, 0) = 1.0;
    t.a(2, 0) = 0.25;
    t.a(2, 1) = 0.25;
    t.b = Eigen::Vector3d(1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0);
    t.c = Eigen::Vector3d(0.0, 1.0, 0.5);
    return t;
}

RkTableau RkTableau::rk4() {
    RkTableau t;
    t.name = "rk4";
    t.p = 4;
    t.a = Eigen::MatrixXd::Zero(4, 4);
    t.a(1, 0) = 0.5;
    t.a(2, 1) = 0.5;
    t.a(3, 2) = 1.0;
    t.b = Eigen::Vector4d(1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0);
    t.c = Eigen::Vector4d(0.0, 0.5, 0.5, 1.0);
    return t;
}

const std::vector<RkTableau>& tableau_catalog() {
    static const std::vector<RkTableau> catalog{RkTableau::ssprk22(), RkTableau::ssprk33(),
                                                RkTableau::rk4()};
    return catalog;
}

RkTableau find_tableau(std::string_view name) {
    for (const auto& t : tableau_catalog()) {
        if (t.name == name) return t;
    }
    throw ConfigError("unknown Runge-Kutta method '" + std::string(name) + "'");
}

RkStep rk_step(const RkTableau& tableau, const OdeProblem& problem, double t, const StateVec& u,
               double dt) {
    if (!tableau.is_explicit()) throw ConfigError("rk_step: only explicit tableaux are supported");
    const int s = tableau.stages();
    RkStep out;
    out.stages.reserve(static_cast<std::size_t>(s));
    out.stage_f.reserve(static_cast<std::size_t>(s));
    out.u_new = u;
    for (int i = 0; i < s; ++i) {
        StateVec y = u;
        for (int j = 0; j < i; ++j) {
            const double aij = tableau.a(i, j);
            if (aij != 0.0) y += (dt * aij) * out.stage_f[static_cast<std::size_t>(j)];
        }
        if (!y.allFinite()) throw NonFinite("rk_step: non-finite stage at t=" + std::to_string(t));
        out.stage_f.push_back(problem.f(t + tableau.c(i) * dt, y));
        out.stages.push_back(std::move(y));
    }
    for (int i = 0; i < s; ++i) {
        out.u_new += (dt * tableau.b(i)) * out.stage_f[static_cast<std::size_t>(i)];
    }
    return out;
}

double rk_eta_estimate(const RkTableau& tableau, const OdeProblem& problem, int fidx,
                       const StateVec& u, const RkStep& step, double dt) {
    const auto& fn = problem.functional(fidx);
    double out = fn.eval(u);
    for (int i = 0; i < tableau.stages(); ++i) {
        const auto si = static_cast<std::size_t>(i);
        out += dt * tableau.b(i) * fn.deriv_dot(step.stages[si], step.stage_f[si]);
    }
    return out;
}

RkRelaxed rk_relax_step(const RkTableau& tableau, const OdeProblem& problem, double t,
                        const StateVec& u, double dt, const RelaxationConfig& cfg,
                        StepDiagnostics* diag) {
    cfg.validate();
    if (cfg.mode != Mode::baseline && tableau.p < 2) {
        throw ConfigError("rk_relax_step: relaxation needs order >= 2");
    }
    const RkStep step = rk_step(tableau, problem, t, u, dt);

    OldValues old{t, u, {}};
    old.eta.reserve(problem.functionals.size());
    for (const auto& fn : problem.functionals) old.eta.push_back(fn.eval(u));

    Proposal proposal{t + dt, step.u_new};
    if (cfg.mode != Mode::baseline && cfg.estimator != Estimator::conserve) {
        proposal.eta_new = rk_eta_estimate(tableau, problem, cfg.target_fidx, u, step, dt);
    }
    RelaxationConfig one = cfg;
    one.m = 1;
    one.nu = {1.0};
    const RelaxedStep r = relax_against(old, proposal, problem, one, dt);
    if (diag) *diag = r.diag;
    return {r.t, r.u, r.gamma};
}

}  // namespace relaxlmm
