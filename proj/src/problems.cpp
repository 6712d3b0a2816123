#include "relaxlmm/problems.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace relaxlmm::problems {

namespace {

constexpr double pi = boost::math::constants::pi<double>();

Functional general(std::string name, FunctionalGoal goal,
                   std::function<double(const StateVec&)> eval,
                   std::function<StateVec(const StateVec&)> gradient) {
    Functional fn;
    fn.name = std::move(name);
    fn.kind = FunctionalKind::general;
    fn.goal = goal;
    fn.eval = std::move(eval);
    fn.deriv_dot = [g = gradient](const StateVec& u, const StateVec& v) { return g(u).dot(v); };
    fn.gradient = std::move(gradient);
    return fn;
}

// Solve E - e sin E = M; the left side is strictly increasing for e < 1.
double solve_kepler_equation(double mean_anomaly, double e) {
    const auto fn = [&](double E) {
        return std::make_pair(E - e * std::sin(E) - mean_anomaly, 1.0 - e * std::cos(E));
    };
    std::uintmax_t iters = 100;
    return boost::math::tools::newton_raphson_iterate(fn, mean_anomaly + e * std::sin(mean_anomaly),
                                                      mean_anomaly - e, mean_anomaly + e,
                                                      std::numeric_limits<double>::digits - 2,
                                                      iters);
}

// Closed-form two-body motion from an initial state (q, p) on a bound orbit.
SolutionFn kepler_orbit(const StateVec& u0, double t0) {
    const double q1 = u0[0], q2 = u0[1], p1 = u0[2], p2 = u0[3];
    const double r0 = std::hypot(q1, q2);
    const double ang = q1 * p2 - q2 * p1;
    const double energy = 0.5 * (p1 * p1 + p2 * p2) - 1.0 / r0;
    if (!(energy < 0.0)) throw ConfigError("kepler: initial state is not a bound orbit");
    const double a = -0.5 / energy;
    const double ex = p2 * ang - q1 / r0;
    const double ey = -p1 * ang - q2 / r0;
    const double e = std::hypot(ex, ey);
    if (!(e > 1e-12)) throw ConfigError("kepler: circular orbits have no periapsis direction");
    const double omega = std::atan2(ey, ex);
    const double n = std::pow(a, -1.5);
    const double sign = ang >= 0.0 ? 1.0 : -1.0;
    const double E0 =
        std::atan2((q1 * p1 + q2 * p2) / (e * std::sqrt(a)), (1.0 - r0 / a) / e);
    const double M0 = E0 - e * std::sin(E0);
    const double b = std::sqrt(1.0 - e * e);
    const double co = std::cos(omega), so = std::sin(omega);

    return [=](double t) {
        const double E = solve_kepler_equation(M0 + n * (t - t0), e);
        const double cE = std::cos(E), sE = std::sin(E);
        const double denom = 1.0 - e * cE;
        const double x = a * (cE - e);
        const double y = sign * a * b * sE;
        const double vx = -a * n * sE / denom;
        const double vy = sign * a * n * b * cE / denom;
        StateVec u(4);
        u << co * x - so * y, so * x + co * y, co * vx - so * vy, so * vx + co * vy;
        return u;
    };
}

double wrap_periodic(double x, double length) {
    double y = std::fmod(x + 0.5 * length, length);
    if (y < 0.0) y += length;
    return y - 0.5 * length;
}

}  // namespace

BurgersFlux parse_burgers_flux(std::string_view s) {
    if (s == "split") return BurgersFlux::split;
    if (s == "central") return BurgersFlux::central;
    throw ConfigError("unknown Burgers flux '" + std::string(s) + "'");
}

OdeProblem nonlinear_oscillator() {
    OdeProblem p;
    p.name = "nonlinear_oscillator";
    p.dim = 2;
    p.rhs = [](double, const StateVec& u) {
        const double r2 = u.squaredNorm();
        if (!(r2 > 0.0)) throw NumericalError("nonlinear_oscillator: singular at u = 0");
        StateVec f(2);
        f << -u[1] / r2, u[0] / r2;
        return f;
    };
    p.functionals = {Functional::quadratic_norm(FunctionalGoal::conserve, "energy")};
    p.exact_solution = [](double t) {
        StateVec u(2);
        u << std::cos(t), std::sin(t);
        return u;
    };
    p.initial = StateVec::Zero(2);
    p.initial[0] = 1.0;
    return p;
}

KeplerStart parse_kepler_start(std::string_view s) {
    if (s == "slow") return KeplerStart::slow;
    if (s == "standard") return KeplerStart::standard;
    throw ConfigError("unknown Kepler start '" + std::string(s) + "'");
}

OdeProblem kepler(double e, KeplerStart start) {
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError("kepler: eccentricity must lie in [0, 1)");
    OdeProblem p;
    p.name = "kepler";
    p.dim = 4;
    p.rhs = [](double, const StateVec& u) {
        const double r = std::hypot(u[0], u[1]);
        if (!(r > 0.0)) throw NumericalError("kepler: collision |q| = 0");
        const double r3 = r * r * r;
        StateVec f(4);
        f << u[2], u[3], -u[0] / r3, -u[1] / r3;
        return f;
    };
    p.functionals = {
        general(
            "hamiltonian", FunctionalGoal::conserve,
            [](const StateVec& u) {
                return 0.5 * (u[2] * u[2] + u[3] * u[3]) - 1.0 / std::hypot(u[0], u[1]);
            },
            [](const StateVec& u) {
                const double r = std::hypot(u[0], u[1]);
                const double r3 = r * r * r;
                StateVec g(4);
                g << u[0] / r3, u[1] / r3, u[2], u[3];
                return g;
            }),
        general(
            "angular_momentum", FunctionalGoal::conserve,
            [](const StateVec& u) { return u[0] * u[3] - u[1] * u[2]; },
            [](const StateVec& u) {
                StateVec g(4);
                g << u[3], -u[2], -u[1], u[0];
                return g;
            }),
    };
    p.initial = StateVec(4);
    const double p2 = start == KeplerStart::slow ? std::sqrt((1.0 - e) / (1.0 + e))
                                                 : std::sqrt((1.0 + e) / (1.0 - e));
    p.initial << 1.0 - e, 0.0, 0.0, p2;
    if (e > 0.0) p.exact_solution = kepler_orbit(p.initial, p.t0);
    return p;
}

OdeProblem exp_entropy() {
    OdeProblem p;
    p.name = "exp_entropy";
    p.dim = 1;
    p.rhs = [](double, const StateVec& u) { return StateVec(-u.array().exp()); };
    p.functionals = {general(
        "entropy", FunctionalGoal::dissipate, [](const StateVec& u) { return std::exp(u[0]); },
        [](const StateVec& u) { return StateVec(u.array().exp()); })};
    p.exact_solution = [](double t) {
        StateVec u(1);
        u[0] = -std::log(std::exp(-0.5) + t);
        return u;
    };
    p.initial = StateVec::Constant(1, 0.5);
    return p;
}

OdeProblem conserved_exponential() {
    OdeProblem p;
    p.name = "conserved_exponential";
    p.dim = 2;
    p.rhs = [](double, const StateVec& u) {
        StateVec f(2);
        f << -std::exp(u[1]), std::exp(u[0]);
        return f;
    };
    p.functionals = {general(
        "entropy", FunctionalGoal::conserve,
        [](const StateVec& u) { return std::exp(u[0]) + std::exp(u[1]); },
        [](const StateVec& u) { return StateVec(u.array().exp()); })};
    p.initial = StateVec::Zero(2);
    const double eta = std::exp(p.initial[0]) + std::exp(p.initial[1]);
    const double c = std::exp(p.initial[0] - p.initial[1]);
    p.exact_solution = [eta, c](double t) {
        const double g = std::exp(eta * t);
        StateVec u(2);
        u << std::log(c * eta / (c + g)), std::log(eta * g / (c + g));
        return u;
    };
    return p;
}

OdeProblem skew3() {
    Eigen::Matrix3d s;
    s << 0, -1, 1, 1, 0, -1, -1, 1, 0;
    OdeProblem p;
    p.name = "skew3";
    p.dim = 3;
    p.rhs = [s](double, const StateVec& u) { return StateVec(s * u); };
    p.functionals = {Functional::quadratic_norm(FunctionalGoal::conserve, "energy"),
                     Functional::linear(StateVec::Ones(3), FunctionalGoal::conserve, "mass")};
    p.initial = StateVec::Zero(3);
    p.initial[0] = -1.0;
    // u(t) = exp(tS) u⁰ via Rodrigues: S = K·√3 with K a unit-axis cross-product matrix.
    p.exact_solution = [s, u0 = p.initial](double t) {
        const double w = std::sqrt(3.0);
        const Eigen::Matrix3d k = s / w;
        const Eigen::Matrix3d rot = Eigen::Matrix3d::Identity() + std::sin(w * t) * k +
                                    (1.0 - std::cos(w * t)) * k * k;
        return StateVec(rot * u0);
    };
    return p;
}

OdeProblem burgers_fd(int n, double eps, BurgersFlux flux) {
    if (n < 4) throw ConfigError("burgers: need at least 4 grid points");
    if (!(eps >= 0.0)) throw ConfigError("burgers: eps must be non-negative");
    const double dx = 2.0 / n;
    OdeProblem p;
    p.name = "burgers";
    p.dim = n;
    p.rhs = [n, dx, eps, flux](double, const StateVec& u) {
        const auto fnum = [&](double a, double b) {
            const double conservative = flux == BurgersFlux::split ? (a * a + a * b + b * b) / 6.0
                                                                   : (a * a + b * b) / 4.0;
            return conservative - eps * (b - a);
        };
        StateVec f(n);
        double left = fnum(u[n - 1], u[0]);
        for (int i = 0; i < n; ++i) {
            const double right = fnum(u[i], u[(i + 1) % n]);
            f[i] = -(right - left) / dx;
            left = right;
        }
        return f;
    };
    p.functionals = {
        Functional::weighted_quadratic(StateVec::Constant(n, dx), FunctionalGoal::dissipate,
                                       "energy"),
        Functional::linear(StateVec::Constant(n, dx), FunctionalGoal::conserve, "mass")};
    p.initial = StateVec(n);
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + i * dx;
        p.initial[i] = std::exp(-30.0 * x * x);
    }
    return p;
}

Eigen::MatrixXd fourier_diff_matrix(int n, double length, int order) {
    if (n < 4 || n % 2 != 0) throw ConfigError("fourier_diff_matrix: n must be even and >= 4");
    if (order != 1 && order != 3) throw ConfigError("fourier_diff_matrix: order must be 1 or 3");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    const double dx = length / n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double delta = (i - j) * dx;
            double sum = 0.0;
            for (int m = 1; m < n / 2; ++m) {
                const double km = 2.0 * pi * m / length;
                const double s = std::sin(km * delta);
                sum += order == 1 ? -2.0 * km * s : 2.0 * km * km * km * s;
            }
            d(i, j) = sum / n;
            d(j, i) = -d(i, j);
        }
    }
    return d;
}

OdeProblem kdv_fourier(int n, double length, double amplitude) {
    if (n % 2 != 0) throw ConfigError("kdv: n must be even");
    if (!(length > 0.0) || !(amplitude > 0.0)) {
        throw ConfigError("kdv: length and amplitude must be positive");
    }
    const Eigen::MatrixXd d1 = fourier_diff_matrix(n, length, 1);
    const Eigen::MatrixXd d3 = fourier_diff_matrix(n, length, 3);
    OdeProblem p;
    p.name = "kdv";
    p.dim = n;
    p.rhs = [d1, d3](double, const StateVec& u) {
        const StateVec du = d1 * u;
        const StateVec sq = u.array().square();
        return StateVec(-(d1 * sq + StateVec(u.array() * du.array())) / 3.0 - d3 * u);
    };
    const double w = length / n;
    p.functionals = {Functional::weighted_quadratic(StateVec::Constant(n, w),
                                                    FunctionalGoal::conserve, "energy"),
                     Functional::linear(StateVec::Constant(n, w), FunctionalGoal::conserve, "mass")};
    const double c = amplitude / 3.0;
    const double width = std::sqrt(3.0 * amplitude) / 6.0;
    const double mu = 0.5 * length;
    p.exact_solution = [=](double t) {
        StateVec u(n);
        for (int j = 0; j < n; ++j) {
            const double xi = wrap_periodic(j * w - c * t - mu, length);
            const double ch = std::cosh(width * xi);
            u[j] = amplitude / (ch * ch);
        }
        return u;
    };
    p.exact_is_pde = true;
    p.initial = (*p.exact_solution)(0.0);
    return p;
}

SbpOperator sbp_central(int n, double dx) {
    if (n < 3) throw ConfigError("sbp_central: need at least 3 nodes");
    SbpOperator op;
    op.h = Eigen::VectorXd::Constant(n, dx);
    op.h[0] = op.h[n - 1] = 0.5 * dx;
    op.q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        op.q(i, i + 1) = 0.5;
        op.q(i + 1, i) = -0.5;
    }
    op.q(0, 0) = -0.5;
    op.q(n - 1, n - 1) = 0.5;
    return op;
}

OdeProblem advection_sbp(int n, double sigma) {
    if (n < 3) throw ConfigError("advection: need at least 3 nodes");
    const double dx = 3.0 / (n - 1);
    const SbpOperator op = sbp_central(n, dx);
    OdeProblem p;
    p.name = "advection";
    p.dim = n;
    // Q is bidiagonal apart from the corners, so apply it without the dense matrix.
    p.rhs = [n, h = op.h, sigma](double t, const StateVec& u) {
        StateVec f(n);
        f[0] = -(-0.5 * u[0] + 0.5 * u[1]) / h[0];
        for (int i = 1; i + 1 < n; ++i) f[i] = -0.5 * (u[i + 1] - u[i - 1]) / h[i];
        f[n - 1] = -(0.5 * u[n - 1] - 0.5 * u[n - 2]) / h[n - 1];
        f[0] -= sigma * (u[0] - std::sin(pi * t)) / h[0];
        return f;
    };
    p.functionals = {Functional::weighted_quadratic(op.h, FunctionalGoal::track, "energy")};
    p.initial = StateVec::Zero(n);
    return p;
}

const std::vector<ProblemInfo>& problem_catalog() {
    static const std::vector<ProblemInfo> catalog{
        {"nonlinear_oscillator", "u' = |u|^-2 (-u2, u1); energy conserved; exact (cos t, sin t)"},
        {"kepler", "planar Kepler problem; H and L conserved; params eccentricity, start (slow|standard)"},
        {"exp_entropy", "u' = -exp(u); exp(u) dissipated; exact -log(exp(-1/2) + t)"},
        {"conserved_exponential", "u1' = -exp(u2), u2' = exp(u1); exp(u1) + exp(u2) conserved"},
        {"skew3", "3x3 skew-symmetric linear system; energy and mass conserved"},
        {"burgers", "periodic Burgers on [-1, 1]; params n, eps, flux (split|central)"},
        {"kdv", "KdV soliton, Fourier collocation; params n, length, amplitude"},
        {"advection", "u_t + u_x = 0 on [0, 3], SAT inflow sin(pi t); params n, sigma"},
    };
    return catalog;
}

OdeProblem make_problem(std::string_view name, const ProblemParams& params) {
    const auto grid = [&](int fallback) { return params.n > 0 ? params.n : fallback; };
    if (name == "nonlinear_oscillator" || name == "oscillator") return nonlinear_oscillator();
    if (name == "kepler") return kepler(params.eccentricity, params.kepler_start);
    if (name == "exp_entropy") return exp_entropy();
    if (name == "conserved_exponential") return conserved_exponential();
    if (name == "skew3") return skew3();
    if (name == "burgers") return burgers_fd(grid(64), params.eps, params.flux);
    if (name == "kdv") return kdv_fourier(grid(64), params.length, params.amplitude);
    if (name == "advection") return advection_sbp(grid(200), params.sat_sigma);
    throw ConfigError("unknown problem '" + std::string(name) + "'");
}

}  // namespace relaxlmm::problems
