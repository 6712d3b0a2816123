#include "relaxlmm/rootfind.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace relaxlmm {

void RootConfig::validate() const {
    if (!(abs_tol > 0.0)) throw ConfigError("RootConfig: abs_tol must be positive");
    if (max_iter < 1) throw ConfigError("RootConfig: max_iter must be at least 1");
    if (!(bracket_expansion > 1.0)) throw ConfigError("RootConfig: bracket_expansion must exceed 1");
    if (!(initial_halfwidth > 0.0)) throw ConfigError("RootConfig: initial_halfwidth must be positive");
    if (max_expansions < 0) throw ConfigError("RootConfig: max_expansions must be non-negative");
    if (samples_per_side < 1) throw ConfigError("RootConfig: samples_per_side must be at least 1");
}

namespace {

RootResult refine(const std::function<double(double)>& r, double lo, double hi, double rlo,
                  double rhi, const RootConfig& cfg) {
    if (rlo == 0.0) return {lo, 0.0, 0.0, 0};
    if (rhi == 0.0) return {hi, 0.0, 0.0, 0};

    std::uintmax_t iters = static_cast<std::uintmax_t>(cfg.max_iter);
    const auto tol = [&](double a, double b) { return std::abs(b - a) <= cfg.abs_tol; };
    const auto [a, b] = boost::math::tools::toms748_solve(r, lo, hi, rlo, rhi, tol, iters);
    const double ra = r(a);
    const double rb = r(b);
    const double width = std::abs(b - a);
    if (width > cfg.abs_tol && std::min(std::abs(ra), std::abs(rb)) > cfg.abs_tol) {
        throw MaxIter("solve_bracketed: no convergence after " + std::to_string(cfg.max_iter) +
                      " iterations (bracket width " + std::to_string(width) + ")");
    }
    RootResult out;
    out.iterations = static_cast<int>(iters);
    out.bracket_width = width;
    if (std::abs(ra) <= std::abs(rb)) {
        out.x = a;
        out.residual = ra;
    } else {
        out.x = b;
        out.residual = rb;
    }
    return out;
}

bool changes_sign(double ra, double rb) {
    return (ra <= 0.0 && rb >= 0.0) || (ra >= 0.0 && rb <= 0.0);
}

}  // namespace

RootResult solve_bracketed(const std::function<double(double)>& r, double center,
                           const RootConfig& cfg) {
    cfg.validate();
    const double rc = r(center);
    if (!std::isfinite(rc)) {
        throw NoBracket("solve_bracketed: residual not finite at center");
    }
    if (rc == 0.0) {
        return {center, 0.0, 0.0, 0};
    }

    double h = cfg.initial_halfwidth;
    for (int expansion = 0; expansion <= cfg.max_expansions; ++expansion, h *= cfg.bracket_expansion) {
        std::optional<RootResult> best;
        // Walk outward from the center on each side and refine the first sign change.
        for (const double dir : {1.0, -1.0}) {
            double a = center;
            double ra = rc;
            for (int j = 1; j <= cfg.samples_per_side; ++j) {
                const double b = center + dir * h * j / cfg.samples_per_side;
                const double rb = r(b);
                if (!std::isfinite(rb)) break;
                if (changes_sign(ra, rb)) {
                    RootResult cand = dir > 0 ? refine(r, a, b, ra, rb, cfg)
                                              : refine(r, b, a, rb, ra, cfg);
                    if (!best || std::abs(cand.x - center) < std::abs(best->x - center)) {
                        best = cand;
                    }
                    break;
                }
                a = b;
                ra = rb;
            }
        }
        if (best) {
            return *best;
        }
    }
    throw NoBracket("solve_bracketed: no sign change within halfwidth " + std::to_string(h) +
                    " of " + std::to_string(center));
}

double solve_gamma_quadratic(double a, double b, double c) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
        throw NonFinite("solve_gamma_quadratic: non-finite coefficients");
    }
    if (!(c > std::numeric_limits<double>::min())) {
        throw Degenerate("solve_gamma_quadratic: c = " + std::to_string(c) +
                         " (new and old states coincide)");
    }
    if (a == 0.0) {
        return -b / c;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        throw NegativeDiscriminant("solve_gamma_quadratic: negative discriminant " +
                                   std::to_string(disc));
    }
    const double sq = std::sqrt(disc);
    // Both forms equal (-b + sqrt(disc)) / (2c); pick the one without cancellation.
    if (b <= 0.0) {
        return (-b + sq) / (2.0 * c);
    }
    return (2.0 * a) / (-b - sq);
}

}  // namespace relaxlmm
