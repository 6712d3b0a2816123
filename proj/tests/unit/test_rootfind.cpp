#include "relaxlmm/rootfind.hpp"

#include <doctest.h>

#include <cmath>

using namespace relaxlmm;

TEST_CASE("bracketed solver examples") {
    CHECK(solve_bracketed([](double x) { return x - 1.0; }, 1.0).x == 1.0);
    CHECK(solve_bracketed([](double x) { return x * x - 2.0; }, 1.0).x ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(solve_bracketed([](double x) { return x * x + 1.0; }, 1.0), NoBracket);
}

TEST_CASE("bracketed solver prefers the root nearest the center") {
    // Roots at 0.05 and 1.02: the spurious root near zero must not win.
    const auto r = [](double x) { return (x - 0.05) * (x - 1.02); };
    CHECK(solve_bracketed(r, 1.0).x == doctest::Approx(1.02).epsilon(1e-12));
    // Two close roots on the same side of the center.
    const auto twin = [](double x) { return (x - 1.1) * (x - 1.15); };
    CHECK(solve_bracketed(twin, 1.0).x == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("bracketed solver expands the bracket") {
    const auto res = solve_bracketed([](double x) { return x - 4.0; }, 1.0);
    CHECK(res.x == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("root config validation") {
    RootConfig cfg;
    cfg.abs_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.samples_per_side = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("quadratic relaxation parameter") {
    SUBCASE("already conservative step gives one") {
        CHECK(solve_gamma_quadratic(0.0, -2.5, 2.5) == doctest::Approx(1.0));
    }
    SUBCASE("b = 0 with a = 0 gives zero") { CHECK(solve_gamma_quadratic(0.0, 0.0, 3.0) == 0.0); }
    SUBCASE("general case satisfies the quadratic") {
        const double a = -0.3, b = -0.7, c = 1.9;
        const double g = solve_gamma_quadratic(a, b, c);
        CHECK(g > 0.0);
        CHECK(std::abs(c * g * g + b * g + a) <= 1e-12 * (std::abs(a) + std::abs(b) * g + c * g * g));
    }
    SUBCASE("continuity in a at zero") {
        const double b = -0.9, c = 1.0;
        CHECK(solve_gamma_quadratic(-1e-12, b, c) == doctest::Approx(solve_gamma_quadratic(0.0, b, c)));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(solve_gamma_quadratic(0.0, -1.0, 0.0), Degenerate);
        CHECK_THROWS_AS(solve_gamma_quadratic(-1.0, 0.0, -1.0), Error);
    }
}

TEST_CASE("SSPRK(2,2) oscillator step coefficients") {
    // Heun step from (1, 0) with Δt = 0.1 on u' = (-u₂, u₁)/|u|², m = 1, η = ½|u|².
    const double dt = 0.1;
    const double y2x = 1.0, y2y = dt;
    const double r2 = y2x * y2x + y2y * y2y;
    const double ux = 0.5 + 0.5 * (y2x + dt * (-y2y / r2));
    const double uy = 0.5 * (y2y + dt * (y2x / r2));
    const double dx = ux - 1.0, dy = uy;
    const double b = dx;                         // ⟨u_old, d⟩ with η_new = η_old
    const double c = 0.5 * (dx * dx + dy * dy);  // η(d)
    CHECK(b == doctest::Approx(-4.95049e-3).epsilon(1e-5));
    CHECK(c == doctest::Approx(4.962871e-3).epsilon(1e-6));
    const double g = solve_gamma_quadratic(0.0, b, c);
    CHECK(g == doctest::Approx(0.997505).epsilon(1e-6));
    const double nx = 1.0 + g * dx, ny = g * dy;
    CHECK(nx * nx + ny * ny == doctest::Approx(1.0).epsilon(1e-14));
}
