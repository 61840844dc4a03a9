#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vacwave/diagnostics.hpp"
#include "vacwave/exact_wave.hpp"
#include "vacwave/version.hpp"
#include "vacwave/viscous_solver.hpp"

namespace vacwave {

using json = nlohmann::json;

/// Configuration error carrying one message per violated field, each
/// prefixed with its path in the config document.
struct ConfigError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ConfigError(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid configuration:";
        for (const auto& e : v) s += "\n  - " + e;
        return s;
    }
};

struct Perturbation {
    enum class Type { none, sine_bump, profile_file } type = Type::none;
    double amplitude = 0.0;
    double width = 10.0;
    std::string path;  // profile_file: CSV rows x,rho,m
};

struct DiagnosticsParams {
    double s = -1.0;  ///< decay-monitor exponent; < 0 means the default b + 3/2
    int l = 1;
    std::vector<double> sigmas{0.25};
    std::vector<double> p_norms{3.0};
    int accumulate_every = 25;  ///< steps between dissipation-accumulator updates
};

struct Scenario {
    std::string name = "scenario";
    FarField ff;
    double eta = 0.1;
    double q = 2.0;
    RegParams rp;
    SolverConfig solver;
    Perturbation pert;
    std::vector<double> observe_times;
    DiagnosticsParams diag;
    bool manufactured = false;

    double f_decay_exponent() const {
        return diag.s > 0.0 ? diag.s : default_f_decay_exponent(ff);
    }
};

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T def) {
    if (j.contains(key)) return j.at(key).get<T>();
    return def;
}

}  // namespace detail

/// Build and validate a Scenario from parsed JSON.  All invariant violations
/// are collected and reported together with their field paths.
inline Scenario scenario_from_json(const json& j, bool allow_decoupled_nu = false) {
    std::vector<std::string> errs;
    Scenario sc;
    sc.name = detail::get_or<std::string>(j, "name", "scenario");

    if (j.contains("far_field")) {
        const json& f = j.at("far_field");
        sc.ff.rho_plus = detail::get_or(f, "rho_plus", 1.0);
        sc.ff.u_plus = detail::get_or(f, "u_plus", 0.0);
        sc.ff.gamma = detail::get_or(f, "gamma", 2.0);
        sc.ff.A = detail::get_or(f, "A", 1.0);
        sc.ff.alpha = detail::get_or(f, "alpha", 1.0);
        sc.ff.B = detail::get_or(f, "B", 1.0);
    }
    try {
        sc.ff.validate();
    } catch (const std::exception& e) {
        errs.push_back(std::string("far_field: ") + e.what());
    }

    if (j.contains("wave")) {
        const json& w = j.at("wave");
        sc.eta = detail::get_or(w, "eta", 0.1);
        sc.q = detail::get_or(w, "q", 2.0);
    }
    if (!(sc.eta > 0.0)) errs.push_back("wave.eta: must be positive");
    if (!(sc.q >= 2.0)) errs.push_back("wave.q: must be >= 2");

    double eps = 1e-3;
    std::optional<double> nu_override;
    if (j.contains("regularization")) {
        const json& r = j.at("regularization");
        eps = detail::get_or(r, "epsilon", 1e-3);
        if (r.contains("nu")) nu_override = r.at("nu").get<double>();
    }
    if (!(eps > 0.0)) {
        errs.push_back("regularization.epsilon: must be positive");
        eps = 1e-3;
    }
    if (errs.empty()) {
        if (nu_override) {
            const double coupled = std::cbrt(eps * eps);
            if (std::fabs(*nu_override - coupled) > 1e-12 * std::max(1.0, coupled) &&
                !allow_decoupled_nu) {
                errs.push_back("regularization.nu: must equal epsilon^(2/3) = " +
                               std::to_string(coupled) +
                               " (pass --decouple-nu to override; outputs are then "
                               "marked non-conforming)");
            } else {
                sc.rp = RegParams::with_nu(eps, *nu_override, sc.ff);
            }
        } else {
            sc.rp = RegParams::coupled(eps, sc.ff);
        }
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        if (s.contains("domain")) {
            const auto d = s.at("domain").get<std::vector<double>>();
            if (d.size() != 2) errs.push_back("solver.domain: expected [x_left, x_right]");
            else { sc.solver.x_left = d[0]; sc.solver.x_right = d[1]; }
        }
        sc.solver.n_cells = detail::get_or(s, "n_cells", 4400);
        sc.solver.cfl = detail::get_or(s, "cfl", 0.45);
        sc.solver.t_end = detail::get_or(s, "t_end", 80.0);
        sc.solver.plm_theta = detail::get_or(s, "plm_theta", 1.5);
        const std::string bc = detail::get_or<std::string>(s, "bc", "wave-following");
        if (bc == "wave-following") sc.solver.bc = SolverConfig::Bc::wave_following;
        else if (bc == "fixed") sc.solver.bc = SolverConfig::Bc::fixed;
        else errs.push_back("solver.bc: must be \"wave-following\" or \"fixed\"");
        const std::string ti = detail::get_or<std::string>(s, "time_integrator", "euler");
        if (ti == "euler") sc.solver.scheme = SolverConfig::Scheme::euler;
        else if (ti == "ssp2") sc.solver.scheme = SolverConfig::Scheme::ssp2;
        else errs.push_back("solver.time_integrator: must be \"euler\" or \"ssp2\"");
    }
    try {
        sc.solver.validate();
    } catch (const std::exception& e) {
        errs.push_back(std::string("solver: ") + e.what());
    }

    if (j.contains("perturbation")) {
        const json& p = j.at("perturbation");
        const std::string t = detail::get_or<std::string>(p, "type", "none");
        if (t == "none") sc.pert.type = Perturbation::Type::none;
        else if (t == "sine-bump") sc.pert.type = Perturbation::Type::sine_bump;
        else if (t == "profile-file") sc.pert.type = Perturbation::Type::profile_file;
        else errs.push_back("perturbation.type: must be none | sine-bump | profile-file");
        sc.pert.amplitude = detail::get_or(p, "amplitude", 0.2);
        sc.pert.width = detail::get_or(p, "width", 10.0);
        sc.pert.path = detail::get_or<std::string>(p, "path", "");
        if (sc.pert.type == Perturbation::Type::sine_bump &&
            !(sc.pert.amplitude > -1.0 && sc.pert.amplitude < 1.0))
            errs.push_back("perturbation.amplitude: must lie in (-1, 1)");
        if (sc.pert.type == Perturbation::Type::profile_file && sc.pert.path.empty())
            errs.push_back("perturbation.path: required for profile-file");
    }

    if (j.contains("observe_times")) {
        sc.observe_times = j.at("observe_times").get<std::vector<double>>();
    } else {
        const int nobs = 11;
        for (int i = 0; i <= nobs; ++i)
            sc.observe_times.push_back(sc.solver.t_end * i / nobs);
    }
    for (std::size_t i = 0; i < sc.observe_times.size(); ++i) {
        const double t = sc.observe_times[i];
        if (t < 0.0 || t > sc.solver.t_end + 1e-12)
            errs.push_back("observe_times[" + std::to_string(i) + "]: outside [0, t_end]");
        if (i > 0 && t < sc.observe_times[i - 1])
            errs.push_back("observe_times[" + std::to_string(i) + "]: not sorted ascending");
    }

    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        sc.diag.s = detail::get_or(d, "s", -1.0);
        sc.diag.l = detail::get_or(d, "l", 1);
        if (d.contains("sigma")) sc.diag.sigmas = d.at("sigma").get<std::vector<double>>();
        if (d.contains("p")) sc.diag.p_norms = d.at("p").get<std::vector<double>>();
        sc.diag.accumulate_every = detail::get_or(d, "accumulate_every", 25);
    }
    if (sc.diag.l < 1) errs.push_back("diagnostics.l: must be >= 1");
    if (sc.diag.s > 0.0) {
        const double b1 = 0.5 * (sc.ff.alpha + sc.ff.gamma - 1.0) + 1.0;
        if (!(sc.diag.s > b1))
            errs.push_back("diagnostics.s: must exceed (alpha+gamma-1)/2 + 1 = " +
                           std::to_string(b1));
    }
    for (double sg : sc.diag.sigmas)
        if (!(sg > 0.0 && sg <= sc.ff.rho_plus))
            errs.push_back("diagnostics.sigma: values must lie in (0, rho_plus]");
    for (double p : sc.diag.p_norms)
        if (!(p > 2.0)) errs.push_back("diagnostics.p: values must exceed 2");
    if (sc.diag.accumulate_every < 1) errs.push_back("diagnostics.accumulate_every: must be >= 1");

    sc.manufactured = detail::get_or(j, "manufactured", false);

    if (!errs.empty()) throw ConfigError(std::move(errs));
    return sc;
}

/// Parse a scenario file; JSON syntax errors surface with the parser's
/// line/column message.
inline Scenario load_scenario(const std::string& path, bool allow_decoupled_nu = false) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file: " + path});
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("parse error in ") + path + ": " + e.what()});
    }
    return scenario_from_json(j, allow_decoupled_nu);
}

/// Fully resolved configuration written next to every run's outputs.
inline json scenario_manifest(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["code_version"] = VACWAVE_VERSION;
    j["far_field"] = {{"rho_plus", sc.ff.rho_plus}, {"u_plus", sc.ff.u_plus},
                      {"gamma", sc.ff.gamma},       {"A", sc.ff.A},
                      {"alpha", sc.ff.alpha},       {"B", sc.ff.B}};
    j["wave"] = {{"eta", sc.eta}, {"q", sc.q}, {"K_q", kq_constant(sc.q)}};
    j["regularization"] = {{"epsilon", sc.rp.epsilon},
                           {"theta", sc.rp.theta},
                           {"nu", sc.rp.nu},
                           {"floor", sc.rp.floor},
                           {"conforming", !sc.rp.decoupled}};
    j["solver"] = {{"domain", {sc.solver.x_left, sc.solver.x_right}},
                   {"n_cells", sc.solver.n_cells},
                   {"cfl", sc.solver.cfl},
                   {"t_end", sc.solver.t_end},
                   {"plm_theta", sc.solver.plm_theta},
                   {"bc", sc.solver.bc == SolverConfig::Bc::wave_following ? "wave-following"
                                                                           : "fixed"},
                   {"time_integrator",
                    sc.solver.scheme == SolverConfig::Scheme::euler ? "euler" : "ssp2"}};
    const char* pt = sc.pert.type == Perturbation::Type::none ? "none"
                     : sc.pert.type == Perturbation::Type::sine_bump ? "sine-bump"
                                                                     : "profile-file";
    j["perturbation"] = {{"type", pt},
                         {"amplitude", sc.pert.amplitude},
                         {"width", sc.pert.width},
                         {"path", sc.pert.path}};
    j["observe_times"] = sc.observe_times;
    j["diagnostics"] = {{"s", sc.f_decay_exponent()},
                        {"l", sc.diag.l},
                        {"sigma", sc.diag.sigmas},
                        {"p", sc.diag.p_norms},
                        {"accumulate_every", sc.diag.accumulate_every}};
    j["manufactured"] = sc.manufactured;
    j["eps_log_product"] = sc.rp.epsilon * std::log1p(sc.solver.t_end);
    j["vacuum_velocity_convention"] =
        "on the vacuum region the reported velocity is the fan-edge limit u_-; the momentum is 0";
    return j;
}

struct SweepSpec {
    json base;
    std::string axis;  ///< dotted path, e.g. "regularization.epsilon"
    std::vector<json> values;
};

inline SweepSpec load_sweep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open sweep file: " + path});
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("parse error in ") + path + ": " + e.what()});
    }
    SweepSpec sw;
    if (!j.contains("base")) throw ConfigError({"sweep.base: required"});
    if (!j.contains("axis")) throw ConfigError({"sweep.axis: required"});
    if (!j.contains("values")) throw ConfigError({"sweep.values: required"});
    sw.base = j.at("base");
    sw.axis = j.at("axis").get<std::string>();
    sw.values = j.at("values").get<std::vector<json>>();
    return sw;
}

/// Apply one sweep value to the base config; the axis must name an existing
/// parameter in the base document.
inline json apply_sweep_value(const SweepSpec& sw, const json& value) {
    std::string ptr = "/" + sw.axis;
    for (auto& c : ptr)
        if (c == '.') c = '/';
    const json::json_pointer jp(ptr);
    if (!sw.base.contains(jp))
        throw ConfigError({"sweep.axis: \"" + sw.axis + "\" does not name an existing parameter"});
    json j = sw.base;
    j[jp] = value;
    return j;
}

}  // namespace vacwave
