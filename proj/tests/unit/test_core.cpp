#include "helpers.hpp"
#include "relaxlmm/core.hpp"
#include "relaxlmm/problems.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace relaxlmm;

TEST_CASE("quadratic norm functional is half the squared norm with the dot product as derivative") {
    const auto eta = Functional::quadratic_norm(FunctionalGoal::conserve);
    StateVec u(3), v(3);
    u << 1.0, -2.0, 0.5;
    v << 0.25, 4.0, -1.0;
    CHECK(eta(u) == 0.5 * (1.0 + 4.0 + 0.25));
    CHECK(eta.deriv_dot(u, v) == 0.25 - 8.0 - 0.5);
    CHECK(eta.kind == FunctionalKind::quadratic_norm);
}

TEST_CASE("linear functional is additive and its derivative is linear in the direction") {
    std::mt19937_64 rng(7);
    StateVec w(4);
    w << 1.0, 2.0, -1.0, 0.5;
    const auto mass = Functional::linear(w, FunctionalGoal::conserve);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVec u = testing::random_state(rng, 4), v = testing::random_state(rng, 4);
        CHECK(mass(u + v) == doctest::Approx(mass(u) + mass(v)).epsilon(1e-14));
        CHECK(mass.deriv_dot(u, 2.0 * v + u) ==
              doctest::Approx(2.0 * mass.deriv_dot(u, v) + mass.deriv_dot(u, u)).epsilon(1e-14));
    }
}

TEST_CASE("gradient assembled from directional derivatives matches the analytic one") {
    const auto p = problems::kepler(0.5);
    Functional h = p.functional(0);
    StateVec u(4);
    u << 0.3, -0.7, 0.2, 1.1;
    const StateVec analytic = h.grad(u);
    h.gradient = nullptr;
    CHECK((h.grad(u) - analytic).norm() < 1e-14);
}

TEST_CASE("weighted quadratic rejects non-positive weights") {
    CHECK_THROWS_AS(Functional::weighted_quadratic(StateVec::Zero(2), FunctionalGoal::conserve),
                    ConfigError);
}

TEST_CASE("eta_dot examples") {
    const auto osc = problems::nonlinear_oscillator();
    StateVec u(2);
    u << 0.3, -1.7;
    CHECK(std::abs(eta_dot(osc, 0, 0.0, u)) < 1e-15);

    const auto ent = problems::exp_entropy();
    const StateVec half = StateVec::Constant(1, 0.5);
    CHECK(eta_dot(ent, 0, 0.0, half) == doctest::Approx(-std::exp(1.0)).epsilon(1e-15));

    const auto adv = problems::advection_sbp(50);
    CHECK(eta_dot(adv, 0, 0.0, StateVec::Zero(adv.dim)) == 0.0);
}

TEST_CASE("problem rhs is checked for dimension and finiteness") {
    OdeProblem p = testing::linear_decay();
    p.rhs = [](double, const StateVec&) { return StateVec(StateVec::Zero(2)); };
    CHECK_THROWS_AS((void)p.f(0.0, StateVec::Ones(1)), Error);
    p.rhs = [](double, const StateVec&) { return StateVec(StateVec::Constant(1, NAN)); };
    CHECK_THROWS_AS((void)p.f(0.0, StateVec::Ones(1)), NonFinite);
    CHECK_THROWS_AS((void)p.functional(3), ConfigError);
}

TEST_CASE("history entries cache rhs and functional values") {
    const auto p = problems::skew3();
    StateVec u(3);
    u << 1.0, 2.0, 3.0;
    const auto e = HistoryEntry::make(p, 0.5, u);
    CHECK(e.f.isApprox(p.rhs(0.5, u)));
    REQUIRE(e.eta.size() == 2);
    CHECK(e.eta[0] == doctest::Approx(7.0));
    CHECK(e.eta[1] == doctest::Approx(6.0));
}

TEST_CASE("step history is a bounded ring with strictly increasing times") {
    const auto p = testing::linear_decay();
    StepHistory h(3);
    CHECK_THROWS_AS(StepHistory(0), ConfigError);
    for (int i = 0; i < 5; ++i) h.push(HistoryEntry::make(p, 0.1 * i, StateVec::Constant(1, i)));
    CHECK(h.size() == 3);
    CHECK(h[0].t == doctest::Approx(0.2));
    CHECK(h.back().t == doctest::Approx(0.4));
    CHECK(h.from_back(1).t == doctest::Approx(0.3));
    const auto last2 = h.last(2);
    CHECK(last2[0]->t == doctest::Approx(0.3));
    CHECK(last2[1]->t == doctest::Approx(0.4));
    CHECK_THROWS_AS(h.push(HistoryEntry::make(p, 0.4, StateVec::Ones(1))), Error);
    CHECK_THROWS_AS((void)h.last(4), Error);
}

TEST_CASE("old values are convex combinations of cached values") {
    const auto p = problems::nonlinear_oscillator();
    StepHistory h(4);
    StateVec a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 2.0;
    h.push(HistoryEntry::make(p, 0.0, a));
    h.push(HistoryEntry::make(p, 1.0, b));

    const double one[] = {1.0};
    const auto newest = old_values(h, 1, one);
    CHECK(newest.t == 1.0);
    CHECK(newest.u.isApprox(b));
    CHECK(newest.eta[0] == doctest::Approx(2.0));

    const double half[] = {0.5, 0.5};
    const auto mid = old_values(h, 2, half);
    CHECK(mid.t == doctest::Approx(0.5));
    CHECK(mid.u.isApprox(0.5 * (a + b)));
    // The convex combination of η values, not η of the combined state.
    CHECK(mid.eta[0] == doctest::Approx(1.25));
    CHECK(p.functional(0)(mid.u) == doctest::Approx(0.625));

    const double bad_sum[] = {0.5, 0.6};
    const double negative[] = {1.5, -0.5};
    CHECK_THROWS_AS(old_values(h, 2, bad_sum), ConfigError);
    CHECK_THROWS_AS(old_values(h, 2, negative), ConfigError);
    CHECK_THROWS_AS(old_values(h, 2, one), ConfigError);
    CHECK_THROWS_AS(old_values(h, 3, half), ConfigError);
}
