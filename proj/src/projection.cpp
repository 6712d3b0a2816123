#include "relaxlmm/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace relaxlmm {

void ProjectionConfig::validate() const {
    if (!(newton_tol > 0.0)) throw ConfigError("ProjectionConfig: newton_tol must be positive");
    if (max_iter < 1) throw ConfigError("ProjectionConfig: max_iter must be at least 1");
    if (direction == ProjectionDirection::custom && !custom_direction) {
        throw ConfigError("ProjectionConfig: custom direction requested but not supplied");
    }
}

Projected project(const StateVec& u_new, double eta_target, const Functional& eta,
                  const ProjectionConfig& cfg) {
    cfg.validate();
    const double tol = cfg.newton_tol * std::max(1.0, std::abs(eta_target));

    Projected out{u_new, 0.0, 0};
    double res = eta.eval(u_new) - eta_target;
    if (std::abs(res) <= tol) return out;

    const StateVec phi =
        cfg.direction == ProjectionDirection::custom ? cfg.custom_direction(u_new) : eta.grad(u_new);
    const double slope = eta.deriv_dot(u_new, phi);
    if (!(std::abs(slope) > 0.0) || !std::isfinite(slope)) {
        throw NewtonDiverged("project: search direction is tangent to the level set");
    }

    double best = std::abs(res);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        out.lambda -= res / slope;
        out.u = u_new + out.lambda * phi;
        out.iterations = iter;
        res = eta.eval(out.u) - eta_target;
        if (!std::isfinite(res)) break;
        if (std::abs(res) <= tol) return out;
        // Residual stuck at roundoff level: accept.
        if (std::abs(res) >= best &&
            std::abs(res) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(1.0, std::abs(eta_target))) {
            return out;
        }
        best = std::min(best, std::abs(res));
    }
    throw NewtonDiverged("project: simplified Newton did not converge (residual " +
                         std::to_string(res) + ")");
}

}  // namespace relaxlmm
