#pragma once

// Scalar root finding for the relaxation parameter.

#include "relaxlmm/core.hpp"

#include <functional>

namespace relaxlmm {

struct RootConfig {
    double abs_tol = 1e-14;
    int max_iter = 200;
    double bracket_expansion = 2.0;
    double initial_halfwidth = 0.5;
    /// Number of bracket expansions before giving up.
    int max_expansions = 8;
    /// Sample points per side of the center at each bracket size; a pair of
    /// close roots inside one half is missed by endpoint signs alone.
    int samples_per_side = 8;

    void validate() const;
};

/// No sign change found around the expansion center. Usually means Δt is too large.
class NoBracket : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MaxIter : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// c ≈ 0 in the quadratic relaxation equation (u_new ≈ u_old).
class Degenerate : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// No real relaxation parameter exists for the quadratic equation.
class NegativeDiscriminant : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct RootResult {
    double x = 0.0;
    /// Width of the final bracket (0 for exact hits and closed forms).
    double bracket_width = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Root of `r` near `center`.
///
/// Brackets are [center - h, center + h] with h growing geometrically from
/// `initial_halfwidth`. Each half is sampled at `samples_per_side` points,
/// walking outward from `center`; the first sign change on each side is
/// refined and the root closest to `center` is returned. A sample that hits
/// zero exactly counts as a sign change.
RootResult solve_bracketed(const std::function<double(double)>& r, double center,
                           const RootConfig& cfg = {});

/// Positive root of c γ² + b γ + a = 0 continuous in a at a → 0.
///
/// a ≤ 0 and c ≥ 0 are the relaxation coefficients for a quadratic
/// functional. For a = 0 the result is -b/c (which is 0 when b = 0).
double solve_gamma_quadratic(double a, double b, double c);

}  // namespace relaxlmm
