#pragma once

#include "relaxlmm/core.hpp"

#include <cmath>
#include <random>

namespace testing {

/// u' = λu in one dimension with η = ½u².
inline relaxlmm::OdeProblem linear_decay(double lambda = -1.0) {
    relaxlmm::OdeProblem p;
    p.name = "linear_decay";
    p.dim = 1;
    p.rhs = [lambda](double, const relaxlmm::StateVec& u) { return relaxlmm::StateVec(lambda * u); };
    p.functionals = {relaxlmm::Functional::quadratic_norm(relaxlmm::FunctionalGoal::dissipate)};
    p.initial = relaxlmm::StateVec::Ones(1);
    p.exact_solution = [lambda](double t) {
        return relaxlmm::StateVec(relaxlmm::StateVec::Constant(1, std::exp(lambda * t)));
    };
    return p;
}

/// u' = g(t) with a polynomial g given by ascending coefficients; u(0) = 0.
inline relaxlmm::OdeProblem polynomial_rhs(std::vector<double> coeffs) {
    relaxlmm::OdeProblem p;
    p.name = "polynomial_rhs";
    p.dim = 1;
    p.rhs = [coeffs](double t, const relaxlmm::StateVec&) {
        double g = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) g = g * t + coeffs[i];
        return relaxlmm::StateVec(relaxlmm::StateVec::Constant(1, g));
    };
    p.functionals = {relaxlmm::Functional::quadratic_norm(relaxlmm::FunctionalGoal::track)};
    p.initial = relaxlmm::StateVec::Zero(1);
    p.exact_solution = [coeffs](double t) {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i] / static_cast<double>(i + 1);
        return relaxlmm::StateVec(relaxlmm::StateVec::Constant(1, v * t));
    };
    return p;
}

inline relaxlmm::StateVec random_state(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    relaxlmm::StateVec u(n);
    for (int i = 0; i < n; ++i) u[i] = dist(rng);
    return u;
}

}  // namespace testing
