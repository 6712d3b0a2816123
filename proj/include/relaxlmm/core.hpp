#pragma once

// Shared domain types: states, functionals, problems, and the accepted-step history.

#include <Eigen/Dense>

#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaxlmm {

using StateVec = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure during integration (non-finite values, solver breakdown).
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonFinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Nonlinear iteration (implicit step or projection) failed to converge.
class NewtonDiverged : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

enum class FunctionalKind { quadratic_norm, linear, general };
enum class FunctionalGoal { conserve, dissipate, track };

/// A scalar functional η together with its directional derivative η'(u)·v.
///
/// `quadratic_norm` means η is a homogeneous quadratic form ½⟨u, W u⟩, which
/// lets the relaxation parameter be computed in closed form. `linear` means
/// η is linear in u.
struct Functional {
    std::string name;
    FunctionalKind kind = FunctionalKind::general;
    FunctionalGoal goal = FunctionalGoal::conserve;
    std::function<double(const StateVec&)> eval;
    std::function<double(const StateVec&, const StateVec&)> deriv_dot;
    /// Optional analytic gradient; assembled from `deriv_dot` when absent.
    std::function<StateVec(const StateVec&)> gradient;

    double operator()(const StateVec& u) const { return eval(u); }

    /// ∇η(u), via the analytic gradient or d directional derivatives.
    [[nodiscard]] StateVec grad(const StateVec& u) const;

    /// η(u) = ½ Σ uᵢ².
    static Functional quadratic_norm(FunctionalGoal goal, std::string name = "energy");
    /// η(u) = ½ Σ wᵢ uᵢ² for positive weights w.
    static Functional weighted_quadratic(StateVec weights, FunctionalGoal goal,
                                         std::string name = "energy");
    /// η(u) = Σ wᵢ uᵢ.
    static Functional linear(StateVec weights, FunctionalGoal goal, std::string name = "mass");
};

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

using RhsFn = std::function<StateVec(double, const StateVec&)>;
using SolutionFn = std::function<StateVec(double)>;

struct OdeProblem {
    std::string name;
    int dim = 0;
    RhsFn rhs;
    std::vector<Functional> functionals;
    std::optional<SolutionFn> exact_solution;
    /// exact_solution samples a PDE solution rather than solving these ODEs, so
    /// it measures total error but is not a consistent source of start values.
    bool exact_is_pde = false;
    StateVec initial;
    double t0 = 0.0;
    bool stiff = false;

    /// rhs(t, u) with dimension and finiteness checks.
    [[nodiscard]] StateVec f(double t, const StateVec& u) const;
    [[nodiscard]] const Functional& functional(int fidx) const;
};

/// (η'f)(u) = η'(u)·rhs(t, u) for functional `fidx`.
double eta_dot(const OdeProblem& problem, int fidx, double t, const StateVec& u);

/// Same, with rhs(t, u) already evaluated.
double eta_dot(const OdeProblem& problem, int fidx, const StateVec& u, const StateVec& f);

[[nodiscard]] bool all_finite(const StateVec& u);

// ---------------------------------------------------------------------------
// History
// ---------------------------------------------------------------------------

/// One accepted step, with rhs and functional values cached at acceptance.
struct HistoryEntry {
    double t = 0.0;
    StateVec u;
    StateVec f;
    std::vector<double> eta;

    static HistoryEntry make(const OdeProblem& problem, double t, StateVec u);
};

/// Bounded buffer of accepted steps, oldest first, with strictly increasing times.
class StepHistory {
public:
    explicit StepHistory(std::size_t capacity);

    void push(HistoryEntry entry);

    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }

    /// Index 0 is the oldest retained entry.
    [[nodiscard]] const HistoryEntry& operator[](std::size_t i) const { return entries_.at(i); }
    [[nodiscard]] const HistoryEntry& back() const { return entries_.back(); }

    /// Entry `lag` steps back from the newest (lag 0 is the newest).
    [[nodiscard]] const HistoryEntry& from_back(std::size_t lag) const;

    /// The most recent `count` entries, oldest first.
    [[nodiscard]] std::vector<const HistoryEntry*> last(std::size_t count) const;

private:
    std::size_t capacity_;
    std::deque<HistoryEntry> entries_;
};

/// Base point of the relaxation secant.
struct OldValues {
    double t = 0.0;
    StateVec u;
    /// Convex combination of cached η values, not η(u).
    std::vector<double> eta;
};

/// Convex combination Σ νᵢ (t, u, η) over the last m history entries, oldest first.
OldValues old_values(const StepHistory& history, int m, std::span<const double> nu);

}  // namespace relaxlmm
