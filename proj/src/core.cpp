#include "relaxlmm/core.hpp"

#include <cmath>
#include <numeric>
#include <utility>

namespace relaxlmm {

bool all_finite(const StateVec& u) { return u.allFinite(); }

StateVec Functional::grad(const StateVec& u) const {
    if (gradient) {
        return gradient(u);
    }
    StateVec g(u.size());
    StateVec e = StateVec::Zero(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        e[i] = 1.0;
        g[i] = deriv_dot(u, e);
        e[i] = 0.0;
    }
    return g;
}

Functional Functional::quadratic_norm(FunctionalGoal goal, std::string name) {
    Functional fn;
    fn.name = std::move(name);
    fn.kind = FunctionalKind::quadratic_norm;
    fn.goal = goal;
    fn.eval = [](const StateVec& u) { return 0.5 * u.squaredNorm(); };
    fn.deriv_dot = [](const StateVec& u, const StateVec& v) { return u.dot(v); };
    fn.gradient = [](const StateVec& u) { return StateVec(u); };
    return fn;
}

Functional Functional::weighted_quadratic(StateVec weights, FunctionalGoal goal, std::string name) {
    if ((weights.array() <= 0.0).any()) {
        throw ConfigError("weighted_quadratic: weights must be positive");
    }
    Functional fn;
    fn.name = std::move(name);
    fn.kind = FunctionalKind::quadratic_norm;
    fn.goal = goal;
    fn.eval = [w = weights](const StateVec& u) {
        return 0.5 * (w.array() * u.array().square()).sum();
    };
    fn.deriv_dot = [w = weights](const StateVec& u, const StateVec& v) {
        return (w.array() * u.array() * v.array()).sum();
    };
    fn.gradient = [w = std::move(weights)](const StateVec& u) {
        return StateVec(w.array() * u.array());
    };
    return fn;
}

Functional Functional::linear(StateVec weights, FunctionalGoal goal, std::string name) {
    Functional fn;
    fn.name = std::move(name);
    fn.kind = FunctionalKind::linear;
    fn.goal = goal;
    fn.eval = [w = weights](const StateVec& u) { return w.dot(u); };
    fn.deriv_dot = [w = weights](const StateVec&, const StateVec& v) { return w.dot(v); };
    fn.gradient = [w = std::move(weights)](const StateVec&) { return w; };
    return fn;
}

StateVec OdeProblem::f(double t, const StateVec& u) const {
    StateVec out = rhs(t, u);
    if (out.size() != dim) {
        throw Error("problem '" + name + "': rhs returned wrong dimension");
    }
    if (!out.allFinite()) {
        throw NonFinite("problem '" + name + "': non-finite rhs at t=" + std::to_string(t));
    }
    return out;
}

const Functional& OdeProblem::functional(int fidx) const {
    if (fidx < 0 || static_cast<std::size_t>(fidx) >= functionals.size()) {
        throw ConfigError("problem '" + name + "': functional index " + std::to_string(fidx) +
                          " out of range");
    }
    return functionals[static_cast<std::size_t>(fidx)];
}

double eta_dot(const OdeProblem& problem, int fidx, double t, const StateVec& u) {
    return eta_dot(problem, fidx, u, problem.f(t, u));
}

double eta_dot(const OdeProblem& problem, int fidx, const StateVec& u, const StateVec& f) {
    return problem.functional(fidx).deriv_dot(u, f);
}

HistoryEntry HistoryEntry::make(const OdeProblem& problem, double t, StateVec u) {
    if (!u.allFinite()) {
        throw NonFinite("non-finite state at t=" + std::to_string(t));
    }
    HistoryEntry e;
    e.t = t;
    e.f = problem.f(t, u);
    e.eta.reserve(problem.functionals.size());
    for (const auto& fn : problem.functionals) {
        e.eta.push_back(fn.eval(u));
    }
    e.u = std::move(u);
    return e;
}

StepHistory::StepHistory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw ConfigError("StepHistory capacity must be positive");
    }
}

void StepHistory::push(HistoryEntry entry) {
    if (!entries_.empty() && !(entry.t > entries_.back().t)) {
        throw Error("StepHistory: times must be strictly increasing");
    }
    if (entries_.size() == capacity_) {
        entries_.pop_front();
    }
    entries_.push_back(std::move(entry));
}

const HistoryEntry& StepHistory::from_back(std::size_t lag) const {
    if (lag >= entries_.size()) {
        throw Error("StepHistory: not enough entries");
    }
    return entries_[entries_.size() - 1 - lag];
}

std::vector<const HistoryEntry*> StepHistory::last(std::size_t count) const {
    if (count > entries_.size()) {
        throw Error("StepHistory: requested " + std::to_string(count) + " entries, have " +
                    std::to_string(entries_.size()));
    }
    std::vector<const HistoryEntry*> out;
    out.reserve(count);
    for (std::size_t i = entries_.size() - count; i < entries_.size(); ++i) {
        out.push_back(&entries_[i]);
    }
    return out;
}

OldValues old_values(const StepHistory& history, int m, std::span<const double> nu) {
    if (m < 1 || static_cast<std::size_t>(m) > history.size()) {
        throw ConfigError("old_values: m must be in [1, history length]");
    }
    if (nu.size() != static_cast<std::size_t>(m)) {
        throw ConfigError("old_values: weight vector must have length m");
    }
    double sum = 0.0;
    for (double w : nu) {
        if (!(w >= 0.0)) {
            throw ConfigError("old_values: weights must be non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ConfigError("old_values: weights must sum to one");
    }

    const auto entries = history.last(static_cast<std::size_t>(m));
    if (m == 1) {
        return {entries[0]->t, entries[0]->u, entries[0]->eta};
    }
    OldValues out;
    out.u = StateVec::Zero(entries[0]->u.size());
    out.eta.assign(entries[0]->eta.size(), 0.0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (nu[i] == 0.0) {
            continue;
        }
        out.t += nu[i] * entries[i]->t;
        out.u += nu[i] * entries[i]->u;
        for (std::size_t j = 0; j < out.eta.size(); ++j) {
            out.eta[j] += nu[i] * entries[i]->eta[j];
        }
    }
    return out;
}

}  // namespace relaxlmm
