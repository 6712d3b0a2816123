#include "relaxlmm/driver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace relaxlmm {

Method resolve_method(std::string_view name) {
    Method m;
    m.name = std::string(name);
    for (const auto& s : scheme_catalog()) {
        if (s.name == name) {
            m.lmm = s;
            return m;
        }
    }
    for (const auto& t : tableau_catalog()) {
        if (t.name == name) {
            m.rk = t;
            return m;
        }
    }
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

StarterKind parse_starter(std::string_view s) {
    if (s == "auto" || s == "automatic") return StarterKind::automatic;
    if (s == "exact") return StarterKind::exact;
    if (s == "rk" || s == "runge_kutta") return StarterKind::runge_kutta;
    throw ConfigError("unknown starter '" + std::string(s) + "'");
}

void RunConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive");
    if (gauss_nodes && *gauss_nodes != 1 && *gauss_nodes != 2) {
        throw ConfigError("gauss_nodes must be 1 or 2");
    }
    if (!std::isfinite(gamma_offset)) throw ConfigError("gamma_offset must be finite");
    const Method method = resolve_method(this->method);
    if (coefficients == CoefficientMode::fixed_coefficients) {
        if (!method.lmm) throw ConfigError("fixed coefficients need a multistep method");
        if (!method.lmm->nonnegative_alpha()) {
            throw ConfigError("fixed coefficients need non-negative alpha (nu = alpha); " +
                              method.lmm->label + " has negative alpha");
        }
        if (estimator == Estimator::dense_gauss) {
            throw ConfigError("fixed coefficients support the conserve and method estimators only");
        }
    }
    if (method.rk && m != 1) throw ConfigError("Runge-Kutta runs use m = 1");
    if (method.lmm && coefficients == CoefficientMode::variable_coefficients && m > method.k()) {
        throw ConfigError("m may not exceed the number of steps k");
    }
    resolve_method(starter_method);
}

RelaxationConfig resolve_relaxation(const RunConfig& cfg, const OdeProblem& problem,
                                    const Method& method) {
    RelaxationConfig rc;
    rc.mode = cfg.mode;
    rc.m = cfg.m;
    rc.nu = cfg.nu;
    rc.adapt = cfg.coefficients;
    rc.target_fidx = cfg.target_fidx;
    rc.root = cfg.root;
    rc.projection = cfg.projection;
    rc.gamma_offset = cfg.gamma_offset;
    const Functional& target = problem.functional(cfg.target_fidx);

    if (cfg.mode != Mode::baseline && method.p() < 2) {
        throw ConfigError("relaxation and projection need a method of order at least 2");
    }

    if (cfg.estimator) {
        rc.estimator = *cfg.estimator;
    } else if (target.goal == FunctionalGoal::conserve || cfg.mode == Mode::baseline) {
        rc.estimator = Estimator::conserve;
    } else if (method.rk) {
        rc.estimator = Estimator::method_quadrature;
    } else {
        const auto uniform = generate_coefficients(*method.lmm, uniform_grid(method.k()), 1.0);
        rc.estimator = uniform.all_nonnegative() ? Estimator::method_quadrature
                                                 : Estimator::dense_gauss;
    }
    rc.gauss_nodes = cfg.gauss_nodes.value_or(method.k() <= 2 ? 1 : 2);

    if (cfg.coefficients == CoefficientMode::fixed_coefficients) {
        const auto uniform = generate_coefficients(*method.lmm, uniform_grid(method.k()), cfg.dt);
        rc.m = method.k();
        rc.nu = uniform.alpha;
    }
    rc.validate();
    return rc;
}

namespace {

StepRecord make_record(const HistoryEntry& e, bool keep_state, bool starter, double gamma) {
    StepRecord r;
    r.t = e.t;
    r.gamma = gamma;
    r.eta = e.eta;
    if (keep_state) r.u = e.u;
    r.starter = starter;
    r.diag.gamma = gamma;
    return r;
}

// Fill the first k history entries; returns the pseudotime of the newest one.
double start_history(const RunConfig& cfg, const OdeProblem& problem, const Method& method,
                     StepHistory& history, std::vector<StepRecord>& records) {
    const int k = method.k();
    history.push(HistoryEntry::make(problem, problem.t0, problem.initial));
    records.push_back(make_record(history.back(), cfg.record_state, true, 1.0));
    if (k == 1) return problem.t0;

    bool exact = cfg.starter == StarterKind::exact;
    if (cfg.starter == StarterKind::automatic) {
        exact = problem.exact_solution.has_value() && !problem.exact_is_pde;
    }
    if (exact && !problem.exact_solution) {
        throw ConfigError("exact starts requested but '" + problem.name + "' has no exact solution");
    }

    if (exact) {
        for (int i = 1; i < k; ++i) {
            const double t = problem.t0 + i * cfg.dt;
            history.push(HistoryEntry::make(problem, t, (*problem.exact_solution)(t)));
            records.push_back(make_record(history.back(), cfg.record_state, true, 1.0));
        }
        return problem.t0 + (k - 1) * cfg.dt;
    }

    const Method starter = resolve_method(cfg.starter_method);
    if (!starter.rk) throw ConfigError("starter method must be a Runge-Kutta method");
    RunConfig sc = cfg;
    sc.mode = cfg.starter_mode.value_or(cfg.mode);
    sc.method = cfg.starter_method;
    sc.m = 1;
    sc.nu = {1.0};
    sc.coefficients = CoefficientMode::variable_coefficients;
    if (sc.estimator == Estimator::dense_gauss) sc.estimator = Estimator::method_quadrature;
    const RelaxationConfig rc = resolve_relaxation(sc, problem, starter);
    for (int i = 1; i < k; ++i) {
        const auto& last = history.back();
        StepDiagnostics diag;
        RkRelaxed r;
        try {
            r = rk_relax_step(*starter.rk, problem, last.t, last.u, cfg.dt, rc, &diag);
        } catch (const StepTooLarge& e) {
            throw StepTooLarge("starting step " + std::to_string(i) + ": " + e.what(), e.dt());
        }
        history.push(HistoryEntry::make(problem, r.t, r.u));
        StepRecord rec = make_record(history.back(), cfg.record_state, true, r.gamma);
        rec.diag = diag;
        records.push_back(std::move(rec));
    }
    return problem.t0 + (k - 1) * cfg.dt;
}

double solution_error(const OdeProblem& problem, double t, const StateVec& u) {
    if (!problem.exact_solution) return std::numeric_limits<double>::quiet_NaN();
    return (u - (*problem.exact_solution)(t)).norm();
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    cfg.validate();
    return run(cfg, problems::make_problem(cfg.problem, cfg.params));
}

RunResult run(const RunConfig& cfg, const OdeProblem& problem) {
    cfg.validate();
    const Method method = resolve_method(cfg.method);
    const RelaxationConfig rc = resolve_relaxation(cfg, problem, method);
    const int k = method.k();
    const bool fixed = rc.adapt == CoefficientMode::fixed_coefficients;
    const double t_end = problem.t0 + cfg.t_final;

    RunResult out;
    out.problem = problem.name;
    out.method = method.name;
    out.mode = cfg.mode;
    for (const auto& fn : problem.functionals) out.functional_names.push_back(fn.name);

    StepHistory history(static_cast<std::size_t>(std::max({k, rc.m, 2})));
    PseudotimeState pseudo;
    pseudo.dtau = cfg.dt;
    pseudo.tau = start_history(cfg, problem, method, history, out.steps);
    pseudo.t = history.back().t;
    if (fixed) {
        for (auto& rec : out.steps) rec.tau = problem.t0 + (&rec - out.steps.data()) * cfg.dt;
    }

    std::optional<LmmCoefficients> frozen;
    if (fixed) frozen = generate_coefficients(*method.lmm, uniform_grid(k), cfg.dt);

    const double tol = 1e-6 * cfg.dt;
    const auto done = [&] {
        return (fixed ? pseudo.tau : history.back().t) >= t_end - tol;
    };

    while (!done()) {
        const int step = out.steps_taken() + 1;
        try {
            RelaxedStep accepted;
            if (method.rk) {
                const auto& last = history.back();
                StepDiagnostics diag;
                const RkRelaxed r = rk_relax_step(*method.rk, problem, last.t, last.u, cfg.dt, rc,
                                                  &diag);
                history.push(HistoryEntry::make(problem, r.t, r.u));
                accepted.t = r.t;
                accepted.gamma = r.gamma;
                accepted.diag = diag;
            } else {
                const auto entries = history.last(static_cast<std::size_t>(k));
                LmmCoefficients coeffs;
                double t_new = 0.0;
                if (fixed) {
                    coeffs = *frozen;
                    t_new = 0.0;
                    for (int i = 0; i < k; ++i) {
                        t_new += coeffs.alpha[static_cast<std::size_t>(i)] * entries[static_cast<std::size_t>(i)]->t;
                    }
                    double beta_sum = 0.0;
                    for (double b : coeffs.beta) beta_sum += b;
                    t_new += cfg.dt * beta_sum;
                } else {
                    t_new = history.back().t + cfg.dt;
                    coeffs = generate_coefficients(*method.lmm, make_grid(history, k, t_new, cfg.dt),
                                                   cfg.dt);
                }

                Proposal proposal;
                proposal.t_new = t_new;
                proposal.u_new = coeffs.is_explicit()
                                     ? lmm_step_explicit(coeffs, history, problem)
                                     : lmm_step_implicit(coeffs, history, problem, t_new, cfg.newton);

                if (rc.mode != Mode::baseline && rc.estimator != Estimator::conserve) {
                    std::optional<StateVec> f_new;
                    if (!coeffs.is_explicit()) f_new = problem.f(t_new, proposal.u_new);
                    if (rc.estimator == Estimator::method_quadrature) {
                        proposal.eta_new =
                            estimate_eta_method(coeffs, history, problem, rc.target_fidx,
                                                &proposal.u_new, f_new ? &*f_new : nullptr);
                    } else {
                        std::optional<std::pair<double, StateVec>> extra;
                        if (f_new) extra.emplace(t_new, *f_new);
                        const DenseOutput dense(history, k, t_new, extra);
                        const auto& lo = history.from_back(static_cast<std::size_t>(rc.m - 1));
                        proposal.eta_new = estimate_eta_gauss(
                            problem, rc.target_fidx, lo.eta[static_cast<std::size_t>(rc.target_fidx)],
                            lo.t, t_new, rc.gauss_nodes, dense);
                    }
                }

                accepted = fixed ? pseudotime_step(proposal, history, problem, rc, pseudo)
                                 : relax_step(proposal, history, problem, rc, cfg.dt);
            }

            StepRecord rec = make_record(history.back(), cfg.record_state, false, accepted.gamma);
            rec.diag = accepted.diag;
            rec.diag.gamma = accepted.gamma;
            if (fixed) rec.tau = pseudo.tau;
            out.steps.push_back(std::move(rec));
            out.max_gamma_dev = std::max(out.max_gamma_dev, std::abs(accepted.gamma - 1.0));
        } catch (const StepTooLarge& e) {
            throw StepTooLarge("step " + std::to_string(step) + ": " + e.what(), e.dt());
        } catch (const NewtonDiverged& e) {
            throw NewtonDiverged("step " + std::to_string(step) + ": " + e.what());
        }
    }

    const auto& last = history.back();
    out.t_last = last.t;
    out.u_last = last.u;
    out.error = solution_error(problem, last.t, last.u);

    const int kd = std::min<int>(method.rk ? 2 : k, static_cast<int>(history.size()));
    out.u_at_final = last.u;
    if (t_end != last.t && t_end >= history.from_back(static_cast<std::size_t>(kd - 1)).t) {
        out.u_at_final = dense_output(history, kd, t_end, t_end);
    }
    out.error_at_final = solution_error(problem, t_end, out.u_at_final);

    out.max_drift.assign(problem.functionals.size(), 0.0);
    for (const auto& rec : out.steps) {
        for (std::size_t j = 0; j < rec.eta.size(); ++j) {
            out.max_drift[j] = std::max(out.max_drift[j], std::abs(rec.eta[j] - out.steps[0].eta[j]));
        }
    }
    if (fixed) out.pseudotime = pseudo;
    return out;
}

std::vector<ConvergenceRow> convergence_study(
    const RunConfig& cfg, const std::vector<double>& dts,
    const std::function<void(std::size_t, const RunResult&)>& on_run) {
    if (dts.size() < 3) throw ConfigError("convergence study needs at least three step sizes");
    for (std::size_t i = 1; i < dts.size(); ++i) {
        if (std::abs(dts[i] - 0.5 * dts[i - 1]) > 1e-12 * dts[i - 1]) {
            throw ConfigError("convergence study step sizes must halve successively");
        }
    }
    cfg.validate();
    const OdeProblem problem = problems::make_problem(cfg.problem, cfg.params);

    std::optional<StateVec> reference;
    if (!problem.exact_solution || problem.exact_is_pde) {
        RunConfig rcfg = cfg;
        rcfg.dt = *std::min_element(dts.begin(), dts.end()) / 16.0;
        rcfg.record_state = false;
        reference = run(rcfg, problem).u_at_final;
    }

    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < dts.size(); ++i) {
        ConvergenceRow row;
        row.dt = dts[i];
        RunConfig c = cfg;
        c.dt = dts[i];
        try {
            const RunResult r = run(c, problem);
            if (on_run) on_run(i, r);
            row.error = reference ? (r.u_at_final - *reference).norm() : r.error;
            row.max_gamma_dev = r.max_gamma_dev;
            row.steps = r.steps_taken();
        } catch (const Error& e) {
            row.failure = e.what();
        }
        if (!rows.empty()) {
            const auto& prev = rows.back();
            if (prev.error > 0.0 && row.error > 0.0) {
                row.eoc = std::log(prev.error / row.error) / std::log(prev.dt / row.dt);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("loglog_slope: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<RunResult> compare_modes(const RunConfig& cfg, const std::vector<Mode>& modes) {
    cfg.validate();
    const OdeProblem problem = problems::make_problem(cfg.problem, cfg.params);
    std::vector<RunResult> out;
    out.reserve(modes.size());
    for (Mode mode : modes) {
        RunConfig c = cfg;
        c.mode = mode;
        // Runge-Kutta starts follow the relaxation variant so all modes share them.
        if (!c.starter_mode) c.starter_mode = Mode::relaxation;
        out.push_back(run(c, problem));
    }
    return out;
}

}  // namespace relaxlmm
