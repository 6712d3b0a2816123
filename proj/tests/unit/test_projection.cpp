#include "helpers.hpp"
#include "relaxlmm/problems.hpp"
#include "relaxlmm/projection.hpp"
#include "relaxlmm/relaxation.hpp"
#include "relaxlmm/rk.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace relaxlmm;

TEST_CASE("projection onto the current level is the identity") {
    const auto eta = Functional::quadratic_norm(FunctionalGoal::conserve);
    StateVec u(2);
    u << 0.3, 0.4;
    const auto pr = project(u, eta(u), eta);
    CHECK(pr.lambda == 0.0);
    CHECK(pr.u == u);
}

TEST_CASE("projection for the squared norm is a radial scaling") {
    const auto eta = Functional::quadratic_norm(FunctionalGoal::conserve);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        const StateVec u = testing::random_state(rng, 5);
        const double target = eta(u) * (0.8 + 0.4 * (trial / 25.0));
        const auto pr = project(u, target, eta);
        const double scale = std::sqrt(target / eta(u));
        CHECK(std::abs(1.0 + pr.lambda - scale) <= 1e-12);
        CHECK((pr.u - scale * u).norm() <= 1e-12 * u.norm());
        CHECK(std::abs(eta(pr.u) - target) <= 10 * 1e-14 * std::max(1.0, target));
    }
}

TEST_CASE("projection with a general functional hits the target") {
    const auto p = problems::exp_entropy();
    const auto& eta = p.functional(0);
    const StateVec u = StateVec::Constant(1, 0.2);
    const auto pr = project(u, 1.1, eta);
    CHECK(std::exp(pr.u[0]) == doctest::Approx(1.1).epsilon(1e-13));
}

TEST_CASE("projection config validation and failure") {
    ProjectionConfig cfg;
    cfg.direction = ProjectionDirection::custom;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.custom_direction = [](const StateVec& u) { return StateVec(StateVec::Zero(u.size())); };
    const auto eta = Functional::quadratic_norm(FunctionalGoal::conserve);
    CHECK_THROWS_AS(project(StateVec::Ones(2), 3.0, eta, cfg), NewtonDiverged);
}

TEST_CASE("projection breaks total mass on the skew system while relaxation keeps it") {
    const auto p = problems::skew3();
    const double dt = 0.1;
    RelaxationConfig cfg;
    cfg.mode = Mode::projection;
    const auto proj = rk_relax_step(RkTableau::ssprk22(), p, 0.0, p.initial, dt, cfg);
    const double expected = -std::sqrt(2.0) / std::sqrt(2.0 + 3.0 * std::pow(dt, 4));
    CHECK(std::abs(p.functional(1)(proj.u) - expected) <= 1e-12);
    CHECK(p.functional(1)(proj.u) == doctest::Approx(-0.99992500).epsilon(1e-8));
    CHECK(std::abs(p.functional(1)(proj.u) + 1.0) > 0.0);

    cfg.mode = Mode::relaxation;
    const auto relax = rk_relax_step(RkTableau::ssprk22(), p, 0.0, p.initial, dt, cfg);
    CHECK(std::abs(p.functional(1)(relax.u) + 1.0) <= 1e-14);
}
