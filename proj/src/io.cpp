#include "relaxlmm/io.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

namespace relaxlmm::io {

namespace {

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("setting '" + key + "': expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError("setting '" + key + "': expected an integer");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string s = boost::algorithm::to_lower_copy(v);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("setting '" + key + "': expected a boolean, got '" + v + "'");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    return f;
}

// 17 significant digits; NaN and infinities spelled the way numpy/pandas read them.
std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

}  // namespace

Settings load_settings(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    Settings out;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            out[section] = body.data();
            continue;
        }
        for (const auto& [key, value] : body) {
            out[section + "." + key] = boost::algorithm::trim_copy(value.data());
        }
    }
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(", "),
                            boost::algorithm::token_compress_on);
    std::vector<double> out;
    for (const auto& p : parts) {
        if (!p.empty()) out.push_back(to_double("list", p));
    }
    return out;
}

void apply_settings(RunConfig& cfg, const Settings& settings) {
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters{
        {"problem.name", [&](auto&, auto& v) { cfg.problem = v; }},
        {"problem.n", [&](auto& k, auto& v) { cfg.params.n = to_int(k, v); }},
        {"problem.length", [&](auto& k, auto& v) { cfg.params.length = to_double(k, v); }},
        {"problem.amplitude", [&](auto& k, auto& v) { cfg.params.amplitude = to_double(k, v); }},
        {"problem.eps", [&](auto& k, auto& v) { cfg.params.eps = to_double(k, v); }},
        {"problem.flux", [&](auto&, auto& v) { cfg.params.flux = problems::parse_burgers_flux(v); }},
        {"problem.eccentricity",
         [&](auto& k, auto& v) { cfg.params.eccentricity = to_double(k, v); }},
        {"problem.start",
         [&](auto&, auto& v) { cfg.params.kepler_start = problems::parse_kepler_start(v); }},
        {"problem.sigma", [&](auto& k, auto& v) { cfg.params.sat_sigma = to_double(k, v); }},
        {"method.name", [&](auto&, auto& v) { cfg.method = v; }},
        {"method.starter", [&](auto&, auto& v) { cfg.starter = parse_starter(v); }},
        {"method.starter_method", [&](auto&, auto& v) { cfg.starter_method = v; }},
        {"method.starter_mode", [&](auto&, auto& v) { cfg.starter_mode = parse_mode(v); }},
        {"relaxation.mode", [&](auto&, auto& v) { cfg.mode = parse_mode(v); }},
        {"relaxation.estimator",
         [&](auto&, auto& v) {
             if (v == "auto") {
                 cfg.estimator.reset();
             } else {
                 cfg.estimator = parse_estimator(v);
             }
         }},
        {"relaxation.m", [&](auto& k, auto& v) { cfg.m = to_int(k, v); }},
        {"relaxation.nu", [&](auto&, auto& v) { cfg.nu = parse_list(v); }},
        {"relaxation.gauss_nodes",
         [&](auto& k, auto& v) {
             if (v == "auto") {
                 cfg.gauss_nodes.reset();
             } else {
                 cfg.gauss_nodes = to_int(k, v);
             }
         }},
        {"relaxation.coefficients",
         [&](auto&, auto& v) { cfg.coefficients = parse_coefficient_mode(v); }},
        {"relaxation.target", [&](auto& k, auto& v) { cfg.target_fidx = to_int(k, v); }},
        {"relaxation.gamma_offset", [&](auto& k, auto& v) { cfg.gamma_offset = to_double(k, v); }},
        {"relaxation.root_tol", [&](auto& k, auto& v) { cfg.root.abs_tol = to_double(k, v); }},
        {"relaxation.newton_tol",
         [&](auto& k, auto& v) {
             cfg.newton.tol = to_double(k, v);
             cfg.projection.newton_tol = cfg.newton.tol;
         }},
        {"time.dt", [&](auto& k, auto& v) { cfg.dt = to_double(k, v); }},
        {"time.t_final", [&](auto& k, auto& v) { cfg.t_final = to_double(k, v); }},
        {"output.state", [&](auto& k, auto& v) { cfg.record_state = to_bool(k, v); }},
    };
    for (const auto& [key, value] : settings) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            // Sections owned by the command line front end.
            if (boost::algorithm::starts_with(key, "output.") ||
                boost::algorithm::starts_with(key, "study.")) {
                continue;
            }
            throw ConfigError("unknown setting '" + key + "'");
        }
        it->second(key, value);
    }
    if (cfg.m != static_cast<int>(cfg.nu.size()) && settings.count("relaxation.nu") == 0) {
        cfg.nu.assign(static_cast<std::size_t>(cfg.m), 1.0 / cfg.m);
    }
}

void write_run_csv(std::ostream& os, const RunResult& result) {
    const bool with_state = !result.steps.empty() && result.steps.front().u.size() > 0;
    const bool with_tau = result.pseudotime.has_value();
    std::string header = with_tau ? "t,tau,gamma" : "t,gamma";
    for (std::size_t j = 0; j < result.functional_names.size(); ++j) header += fmt::format(",eta_{}", j);
    if (with_state) {
        for (Eigen::Index i = 0; i < result.steps.front().u.size(); ++i) header += fmt::format(",u_{}", i);
    }
    fmt::print(os, "{}\n", header);
    for (const auto& rec : result.steps) {
        std::string line = num(rec.t) + (with_tau ? "," + num(rec.tau) : "") + "," + num(rec.gamma);
        for (double e : rec.eta) line += "," + num(e);
        if (with_state) {
            for (Eigen::Index i = 0; i < rec.u.size(); ++i) line += "," + num(rec.u[i]);
        }
        fmt::print(os, "{}\n", line);
    }
}

void write_run_csv(const std::string& path, const RunResult& result) {
    auto f = open_out(path);
    write_run_csv(f, result);
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    fmt::print(os, "dt,error,eoc,max_gamma_dev,steps,status\n");
    for (const auto& r : rows) {
        std::string status = r.failure.empty() ? "ok" : r.failure;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        fmt::print(os, "{},{},{},{},{},{}\n", num(r.dt), num(r.error), num(r.eoc),
                   num(r.max_gamma_dev), r.steps, status);
    }
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
    auto f = open_out(path);
    write_convergence_csv(f, rows);
}

void write_compare_csv(std::ostream& os, const std::vector<RunResult>& runs) {
    std::string header = "step";
    std::size_t rows = 0;
    for (const auto& r : runs) {
        const auto mode = std::string(to_string(r.mode));
        header += fmt::format(",t_{0},gamma_{0}", mode);
        for (const auto& name : r.functional_names) header += fmt::format(",{}_{}", name, mode);
        rows = std::max(rows, r.steps.size());
    }
    fmt::print(os, "{}\n", header);
    for (std::size_t n = 0; n < rows; ++n) {
        std::string line = std::to_string(n);
        for (const auto& r : runs) {
            if (n < r.steps.size()) {
                const auto& rec = r.steps[n];
                line += "," + num(rec.t) + "," + num(rec.gamma);
                for (double e : rec.eta) line += "," + num(e);
            } else {
                line += ",,";
                for (std::size_t j = 0; j < r.functional_names.size(); ++j) line += ",";
            }
        }
        fmt::print(os, "{}\n", line);
    }
}

void write_compare_csv(const std::string& path, const std::vector<RunResult>& runs) {
    auto f = open_out(path);
    write_compare_csv(f, runs);
}

}  // namespace relaxlmm::io
