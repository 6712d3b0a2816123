// Python bindings: runs, studies and coefficient generation over the C++ core.

#include "relaxlmm/driver.hpp"
#include "relaxlmm/io.hpp"
#include "relaxlmm/lmm.hpp"
#include "relaxlmm/problems.hpp"
#include "relaxlmm/rk.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace relaxlmm;

namespace {

RunConfig make_config(const io::Settings& settings) {
    RunConfig cfg;
    io::apply_settings(cfg, settings);
    return cfg;
}

// Per-step columns of a run as dense arrays.
Eigen::VectorXd column(const RunResult& r, double StepRecord::*field) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(r.steps.size()));
    for (std::size_t i = 0; i < r.steps.size(); ++i) out[static_cast<Eigen::Index>(i)] = r.steps[i].*field;
    return out;
}

Eigen::MatrixXd eta_matrix(const RunResult& r) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(r.steps.size()),
                        static_cast<Eigen::Index>(r.functional_names.size()));
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        for (std::size_t j = 0; j < r.steps[i].eta.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.steps[i].eta[j];
        }
    }
    return out;
}

Eigen::MatrixXd state_matrix(const RunResult& r) {
    if (r.steps.empty() || r.steps.front().u.size() == 0) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(r.steps.size()), r.steps.front().u.size());
    for (std::size_t i = 0; i < r.steps.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = r.steps[i].u.transpose();
    return out;
}

}  // namespace

PYBIND11_MODULE(_relaxlmm, m) {
    m.doc() = "Relaxation and projection for linear multistep and Runge-Kutta methods";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
    py::register_exception<StepTooLarge>(m, "StepTooLarge", numerical.ptr());

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("problem", &RunResult::problem)
        .def_readonly("method", &RunResult::method)
        .def_property_readonly("mode", [](const RunResult& r) { return std::string(to_string(r.mode)); })
        .def_readonly("functional_names", &RunResult::functional_names)
        .def_property_readonly("t", [](const RunResult& r) { return column(r, &StepRecord::t); })
        .def_property_readonly("gamma", [](const RunResult& r) { return column(r, &StepRecord::gamma); })
        .def_property_readonly("tau", [](const RunResult& r) { return column(r, &StepRecord::tau); })
        .def_property_readonly("eta", &eta_matrix)
        .def_property_readonly("u", &state_matrix)
        .def_property_readonly("starter",
                               [](const RunResult& r) {
                                   std::vector<bool> s;
                                   for (const auto& rec : r.steps) s.push_back(rec.starter);
                                   return s;
                               })
        .def_readonly("t_last", &RunResult::t_last)
        .def_readonly("u_last", &RunResult::u_last)
        .def_readonly("u_at_final", &RunResult::u_at_final)
        .def_readonly("error", &RunResult::error)
        .def_readonly("error_at_final", &RunResult::error_at_final)
        .def_readonly("max_gamma_dev", &RunResult::max_gamma_dev)
        .def_readonly("max_drift", &RunResult::max_drift)
        .def_property_readonly("steps_taken", &RunResult::steps_taken)
        .def("__repr__", [](const RunResult& r) {
            return "<RunResult " + r.problem + "/" + r.method + "/" + std::string(to_string(r.mode)) +
                   ", " + std::to_string(r.steps_taken()) + " steps>";
        });

    py::class_<ConvergenceRow>(m, "ConvergenceRow")
        .def_readonly("dt", &ConvergenceRow::dt)
        .def_readonly("error", &ConvergenceRow::error)
        .def_readonly("eoc", &ConvergenceRow::eoc)
        .def_readonly("max_gamma_dev", &ConvergenceRow::max_gamma_dev)
        .def_readonly("steps", &ConvergenceRow::steps)
        .def_readonly("failure", &ConvergenceRow::failure);

    m.def(
        "run", [](const io::Settings& s) { return run(make_config(s)); }, py::arg("settings"),
        py::call_guard<py::gil_scoped_release>(),
        "Integrate one configuration given as flat 'section.key' settings.");
    m.def(
        "convergence",
        [](const io::Settings& s, const std::vector<double>& dts) {
            return convergence_study(make_config(s), dts);
        },
        py::arg("settings"), py::arg("dts"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "compare",
        [](const io::Settings& s, const std::vector<std::string>& modes) {
            std::vector<Mode> ms;
            for (const auto& name : modes) ms.push_back(parse_mode(name));
            return compare_modes(make_config(s), ms);
        },
        py::arg("settings"), py::arg("modes"), py::call_guard<py::gil_scoped_release>());

    m.def("loglog_slope", &loglog_slope, py::arg("x"), py::arg("y"));

    m.def(
        "coefficients",
        [](const std::string& name, const std::vector<double>& omega, double dt_ref) {
            const auto c = generate_coefficients(find_scheme(name), StepGrid{omega}, dt_ref);
            return py::make_tuple(c.alpha, c.beta);
        },
        py::arg("scheme"), py::arg("omega"), py::arg("dt_ref") = 1.0,
        "(alpha, beta) of a multistep scheme on the normalized grid omega, oldest first.");
    m.def(
        "order_condition",
        [](const std::vector<double>& alpha, const std::vector<double>& beta,
           const std::vector<double>& omega, int ell) {
            LmmCoefficients c;
            c.alpha = alpha;
            c.beta = beta;
            return order_condition(c, StepGrid{omega}, ell);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("omega"), py::arg("ell"));

    m.def("methods", [] {
        std::vector<py::dict> out;
        for (const auto& s : scheme_catalog()) {
            out.push_back(py::dict(py::arg("name") = s.name, py::arg("label") = s.label,
                                   py::arg("k") = s.k, py::arg("p") = s.p,
                                   py::arg("explicit") = s.is_explicit(), py::arg("kind") = "lmm"));
        }
        for (const auto& t : tableau_catalog()) {
            out.push_back(py::dict(py::arg("name") = t.name, py::arg("label") = t.name,
                                   py::arg("k") = 1, py::arg("p") = t.p,
                                   py::arg("explicit") = t.is_explicit(), py::arg("kind") = "rk"));
        }
        return out;
    });
    m.def("problems", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& p : problems::problem_catalog()) out.emplace_back(p.name, p.description);
        return out;
    });
}
