#include "helpers.hpp"
#include "relaxlmm/lmm.hpp"
#include "relaxlmm/problems.hpp"
#include "relaxlmm/relaxation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace relaxlmm;

namespace {

StepHistory exact_history(const OdeProblem& p, int k, double dt) {
    StepHistory h(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) h.push(HistoryEntry::make(p, i * dt, (*p.exact_solution)(i * dt)));
    return h;
}

}  // namespace

TEST_CASE("parsing of modes, estimators and coefficient modes") {
    CHECK(parse_mode("idt") == Mode::idt);
    CHECK(parse_estimator("gauss") == Estimator::dense_gauss);
    CHECK(parse_estimator("method") == Estimator::method_quadrature);
    CHECK(parse_coefficient_mode("fixed") == CoefficientMode::fixed_coefficients);
    CHECK_THROWS_AS(parse_mode("relax"), ConfigError);
    CHECK(to_string(Mode::projection) == "projection");
}

TEST_CASE("relaxation config validation") {
    RelaxationConfig cfg;
    cfg.m = 2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.nu = {0.3, 0.7};
    CHECK_NOTHROW(cfg.validate());
    cfg.gauss_nodes = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("secant residual") {
    const auto eta = Functional::quadratic_norm(FunctionalGoal::conserve);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVec uo = testing::random_state(rng, 3), un = testing::random_state(rng, 3);
        // m = 1: η_old = η(u_old) so r(0) = 0.
        CHECK(residual_r(0.0, uo, un, eta(uo), 0.7, eta) == 0.0);
        // Quadratic η: r(γ) = cγ² + bγ + a.
        const double eta_old = eta(uo) + 0.2, eta_new = 0.9;
        const StateVec d = un - uo;
        const double a = eta(uo) - eta_old;
        const double b = uo.dot(d) - eta_new + eta_old;
        const double c = 0.5 * d.squaredNorm();
        for (double g : {-0.5, 0.3, 1.0, 1.7}) {
            CHECK(residual_r(g, uo, un, eta_old, eta_new, eta) ==
                  doctest::Approx(c * g * g + b * g + a).epsilon(1e-12));
        }
    }
}

TEST_CASE("closed-form and bracketed gamma agree for quadratic functionals") {
    auto quad = Functional::quadratic_norm(FunctionalGoal::conserve);
    Functional general = quad;
    general.kind = FunctionalKind::general;
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> planted(0.8, 1.2);
    for (int trial = 0; trial < 50; ++trial) {
        const StateVec uo = testing::random_state(rng, 4);
        const StateVec un = uo + 0.05 * testing::random_state(rng, 4);
        // η_new chosen so that r(g) = 0; η_old ≥ η(u_old) as for convex old values.
        const double eta_old = quad(uo) + 1e-4 * (trial % 3);
        const double g = planted(rng);
        const double eta_new = eta_old + (quad(uo + g * (un - uo)) - eta_old) / g;
        const auto a = solve_relaxation_gamma(quad, uo, un, eta_old, eta_new, {});
        const auto b = solve_relaxation_gamma(general, uo, un, eta_old, eta_new, {});
        CHECK(std::abs(a.x - g) <= 1e-10);
        CHECK(std::abs(a.x - b.x) <= 1e-10);
    }
}

TEST_CASE("method-quadrature estimate") {
    SUBCASE("SSP(3,2) on the exponential entropy ODE") {
        const auto p = problems::exp_entropy();
        const double dt = 0.1;
        const auto h = exact_history(p, 3, dt);
        const auto c = generate_coefficients(schemes::ssp32(), make_grid(h, 3, 0.3, dt), dt);
        const auto u = [&](double t) { return -std::log(std::exp(-0.5) + t); };
        const double oracle = 0.25 * std::exp(u(0.0)) + 0.75 * std::exp(u(0.2)) +
                              dt * 1.5 * (-std::exp(2.0 * u(0.2)));
        const double est = estimate_eta_method(c, h, p, 0);
        CHECK(est == doctest::Approx(oracle).epsilon(1e-14));
        CHECK(est <= std::exp(u(0.2)));
        CHECK(std::abs(est - std::exp(u(0.3))) < 1e-2);
    }
    SUBCASE("linear functional commutes with the step") {
        const auto p = problems::skew3();
        StepHistory h(3);
        std::mt19937_64 rng(23);
        for (int i = 0; i < 3; ++i) h.push(HistoryEntry::make(p, 0.1 * i, testing::random_state(rng, 3)));
        const auto c = generate_coefficients(schemes::ssp32(), make_grid(h, 3, 0.3, 0.1), 0.1);
        const StateVec un = lmm_step_explicit(c, h, p);
        CHECK(estimate_eta_method(c, h, p, 1) == doctest::Approx(p.functional(1)(un)).epsilon(1e-14));
    }
    SUBCASE("conservative problem gives the alpha-weighted history") {
        const auto p = problems::nonlinear_oscillator();
        const auto h = exact_history(p, 4, 0.1);
        const auto c = generate_coefficients(schemes::ssp43(), make_grid(h, 4, 0.4, 0.1), 0.1);
        CHECK(estimate_eta_method(c, h, p, 0) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("negative coefficients are rejected") {
        const auto p = problems::exp_entropy();
        const auto h = exact_history(p, 2, 0.1);
        const auto c = generate_coefficients(schemes::adams(2), make_grid(h, 2, 0.2, 0.1), 0.1);
        CHECK_THROWS_AS(estimate_eta_method(c, h, p, 0), NegativeCoefficients);
    }
}

TEST_CASE("Gauss estimate") {
    // u' = g(t) with η the plain sum, so (η'f)(y(τ)) = g(τ).
    auto make = [](std::vector<double> g) {
        auto p = testing::polynomial_rhs(std::move(g));
        p.functionals = {Functional::linear(StateVec::Ones(1), FunctionalGoal::track)};
        return p;
    };
    SUBCASE("conservative rate") {
        const auto p = make({0.0});
        const auto h = exact_history(p, 2, 0.5);
        const DenseOutput dense(h, 2, 1.0);
        CHECK(estimate_eta_gauss(p, 0, 3.0, 0.0, 1.0, 1, dense) == 3.0);
    }
    SUBCASE("constant rate") {
        const auto p = make({-2.0});
        const auto h = exact_history(p, 2, 0.5);
        const DenseOutput dense(h, 2, 1.0);
        for (int nodes : {1, 2}) {
            CHECK(estimate_eta_gauss(p, 0, 1.0, 0.0, 1.0, nodes, dense) == doctest::Approx(1.0 - 2.0));
        }
    }
    SUBCASE("linear rate is integrated exactly by both rules") {
        const auto p = make({0.5, 3.0});
        const auto h = exact_history(p, 2, 0.4);
        const DenseOutput dense(h, 2, 1.0);
        const double lo = 0.4, hi = 1.0;
        const double exact = 0.5 * (hi - lo) + 1.5 * (hi * hi - lo * lo);
        for (int nodes : {1, 2}) {
            CHECK(estimate_eta_gauss(p, 0, 0.0, lo, hi, nodes, dense) == doctest::Approx(exact).epsilon(1e-14));
        }
        CHECK_THROWS_AS(estimate_eta_gauss(p, 0, 0.0, lo, hi, 3, dense), ConfigError);
    }
}

TEST_CASE("relax_step enforces the secant equation and appends history") {
    const auto p = problems::kepler(0.5, problems::KeplerStart::standard);
    const double dt = 0.01;
    StepHistory h = exact_history(p, 3, dt);
    RelaxationConfig cfg;
    const auto c = generate_coefficients(schemes::adams(3), make_grid(h, 3, 3 * dt, dt), dt);
    const Proposal prop{3 * dt, lmm_step_explicit(c, h, p)};
    const double eta_old = h.back().eta[0];
    const auto r = relax_step(prop, h, p, cfg, dt);
    CHECK(h.size() == 3);
    CHECK(h.back().t == r.t);
    CHECK(std::abs(p.functional(0)(r.u) - eta_old) <= 10 * cfg.root.abs_tol);
    CHECK(r.t == doctest::Approx(2 * dt + r.gamma * dt));
    CHECK(std::abs(r.gamma - 1.0) < 1e-2);
}

TEST_CASE("relaxation with m = 2 keeps a convex functional's old values consistent") {
    const auto p = problems::exp_entropy();
    StepHistory h = exact_history(p, 2, 0.1);
    RelaxationConfig cfg;
    cfg.m = 2;
    cfg.nu = {0.5, 0.5};
    const OldValues old = old_values(h, 2, cfg.nu);
    // Jensen: η(u_old) ≤ η_old.
    CHECK(residual_r(0.0, old.u, old.u + StateVec::Ones(1), old.eta[0], 0.0, p.functional(0)) <= 0.0);
}

TEST_CASE("IDT and projection leave time alone; baseline leaves everything alone") {
    const auto p = problems::nonlinear_oscillator();
    const auto h0 = exact_history(p, 2, 0.1);
    StateVec u_new(2);
    u_new << std::cos(0.2) * 1.0005, std::sin(0.2) * 1.0005;
    for (Mode mode : {Mode::baseline, Mode::idt, Mode::projection}) {
        StepHistory h = h0;
        RelaxationConfig cfg;
        cfg.mode = mode;
        const auto r = relax_step({0.2, u_new}, h, p, cfg, 0.1);
        CHECK(r.t == 0.2);
        if (mode == Mode::baseline) {
            CHECK(r.u == u_new);
        } else {
            CHECK(r.u.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("pseudotime bookkeeping") {
    const auto p = problems::nonlinear_oscillator();
    StepHistory h = exact_history(p, 2, 0.1);
    RelaxationConfig cfg;
    cfg.mode = Mode::baseline;
    cfg.adapt = CoefficientMode::fixed_coefficients;
    PseudotimeState st{0.1, 0.1, 0.1, 0.0};
    for (int n = 2; n < 6; ++n) {
        const double tau = n * 0.1;
        pseudotime_step({tau, (*p.exact_solution)(tau)}, h, p, cfg, st);
        CHECK(st.tau == doctest::Approx(tau));
        CHECK(st.t == doctest::Approx(st.tau));
    }
    CHECK(st.max_scaling_dev < 1e-12);
    cfg.adapt = CoefficientMode::variable_coefficients;
    CHECK_THROWS_AS(pseudotime_step({0.7, p.initial}, h, p, cfg, st), ConfigError);
}

TEST_CASE("no admissible gamma is reported as a step-size problem") {
    const auto p = problems::exp_entropy();
    StepHistory h = exact_history(p, 1, 0.1);
    RelaxationConfig cfg;
    cfg.estimator = Estimator::method_quadrature;
    // A target far below anything on the secant line.
    Proposal prop{0.1, StateVec::Constant(1, 0.4), -100.0};
    CHECK_THROWS_AS(relax_step(prop, h, p, cfg, 0.1), StepTooLarge);
}
