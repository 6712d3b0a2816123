#pragma once

// Orthogonal projection onto a level set of a functional (comparison baseline).

#include "relaxlmm/core.hpp"

#include <functional>

namespace relaxlmm {

enum class ProjectionDirection { gradient, custom };

struct ProjectionConfig {
    double newton_tol = 1e-14;
    int max_iter = 50;
    ProjectionDirection direction = ProjectionDirection::gradient;
    /// Search direction Φ(u_new) when `direction == custom`.
    std::function<StateVec(const StateVec&)> custom_direction;

    void validate() const;
};

struct Projected {
    StateVec u;
    double lambda = 0.0;
    int iterations = 0;
};

/// u_λ = u_new + λΦ with η(u_λ) = eta_target.
///
/// Φ = ∇η(u_new) is held fixed and λ is found by simplified Newton from 0.
/// The tolerance is relative to max(1, |eta_target|).
Projected project(const StateVec& u_new, double eta_target, const Functional& eta,
                  const ProjectionConfig& cfg = {});

}  // namespace relaxlmm
