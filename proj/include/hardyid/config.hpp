#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardyid/identify.hpp"
#include "hardyid/trajectory.hpp"

namespace hardyid {

/// Dictionary description prior to construction.
struct DictionarySpec {
    std::string type = "monomial";  // "monomial" | "cauchy"
    int count = 4;                  // monomial count (also the extras for cauchy)
    std::vector<RootCluster> poles;  // cauchy centers; defaults to the symbol poles
};

struct SimulationConfig {
    std::vector<Complex> starts;
    double T = 0.2;
    double dt = 1e-3;
    GuardSettings guards;
};

struct IdentificationConfig {
    QuadRule rule = QuadRule::trapezoid;
    RhsEstimator estimator = RhsEstimator::data_integral;
    double svd_rel_tol = 1e-10;
    bool real_theta = false;
    bool exact_velocity = false;
    int windows = 10;  // baseline estimator only
};

struct ExperimentConfig {
    Polynomial p;
    Polynomial q;
    std::optional<std::vector<RootCluster>> explicit_poles;
    DictionarySpec dictionary;
    SimulationConfig simulation;
    IdentificationConfig identification;

    /// Explicitly supplied poles win over root finding.
    RationalSymbol make_symbol() const {
        if (explicit_poles) return RationalSymbol(p, q, *explicit_poles);
        return RationalSymbol(p, q);
    }

    BlaschkeProduct make_blaschke() const { return BlaschkeProduct(make_symbol().poles()); }

    Dictionary make_dictionary() const {
        if (dictionary.type == "monomial") return Dictionary::monomials(dictionary.count);
        std::vector<RootCluster> poles = dictionary.poles;
        if (poles.empty()) poles = make_symbol().poles();
        return Dictionary::cauchy_for_poles(poles, dictionary.count);
    }
};

namespace cfg_detail {

inline Complex parse_complex(const nlohmann::json& j, const char* what) {
    if (j.is_number()) return Complex{j.get<double>(), 0.0};
    if (!j.is_object() || !j.contains("re") || !j.contains("im"))
        throw ConfigError(std::string(what) + ": expected {re, im}");
    return Complex{j["re"].get<double>(), j["im"].get<double>()};
}

inline Polynomial parse_polynomial(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
    std::vector<Complex> coeffs;
    for (const auto& c : j) coeffs.push_back(parse_complex(c, what));
    return Polynomial(std::move(coeffs));
}

inline std::vector<RootCluster> parse_poles(const nlohmann::json& j) {
    std::vector<RootCluster> poles;
    for (const auto& pj : j) {
        RootCluster p;
        p.location = parse_complex(pj, "poles");
        p.multiplicity = pj.is_object() && pj.contains("mult") ? pj["mult"].get<int>() : 1;
        poles.push_back(p);
    }
    return poles;
}

inline nlohmann::json complex_json(Complex z) {
    return nlohmann::json{{"re", z.real()}, {"im", z.imag()}};
}

}  // namespace cfg_detail

/// Named symbols shipped with the presets.
inline std::pair<Polynomial, Polynomial> named_symbol(const std::string& name) {
    const Complex a{0.2, 0.1};
    if (name == "one_over_z") return {Polynomial{1.0}, Polynomial{0.0, 1.0}};
    if (name == "offcenter_pole")
        return {Polynomial{1.0}, Polynomial({-a, Complex{1.0, 0.0}})};
    if (name == "two_pole") {
        // q = (z - a)(z + 0.3)
        return {Polynomial{1.0},
                Polynomial::from_roots({{a, 1}, {Complex{-0.3, 0.0}, 1}}, {1.0, 0.0})};
    }
    throw ConfigError("unknown symbol preset '" + name + "'");
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using cfg_detail::parse_complex;
    ExperimentConfig cfg;
    if (!j.contains("symbol")) throw ConfigError("config: missing 'symbol'");
    const auto& sym = j["symbol"];
    if (sym.is_string()) {
        std::tie(cfg.p, cfg.q) = named_symbol(sym.get<std::string>());
    } else if (sym.is_object() && sym.contains("p") && sym.contains("q")) {
        cfg.p = cfg_detail::parse_polynomial(sym["p"], "symbol.p");
        cfg.q = cfg_detail::parse_polynomial(sym["q"], "symbol.q");
    } else {
        throw ConfigError("config: 'symbol' must be a preset name or {p, q}");
    }

    if (j.contains("poles")) cfg.explicit_poles = cfg_detail::parse_poles(j["poles"]);

    if (j.contains("dictionary")) {
        const auto& d = j["dictionary"];
        cfg.dictionary.type = d.value("type", "monomial");
        if (cfg.dictionary.type != "monomial" && cfg.dictionary.type != "cauchy")
            throw ConfigError("config: dictionary.type must be 'monomial' or 'cauchy'");
        cfg.dictionary.count = d.value("count", cfg.dictionary.type == "monomial" ? 4 : 0);
        if (d.contains("poles")) cfg.dictionary.poles = cfg_detail::parse_poles(d["poles"]);
    }

    if (j.contains("simulation")) {
        const auto& s = j["simulation"];
        if (s.contains("z0")) {
            if (s["z0"].is_array())
                for (const auto& z : s["z0"]) cfg.simulation.starts.push_back(parse_complex(z, "z0"));
            else
                cfg.simulation.starts.push_back(parse_complex(s["z0"], "z0"));
        }
        cfg.simulation.T = s.value("T", cfg.simulation.T);
        cfg.simulation.dt = s.value("dt", cfg.simulation.dt);
        if (s.contains("guards")) {
            cfg.simulation.guards.pole_ball =
                s["guards"].value("pole_ball", cfg.simulation.guards.pole_ball);
            cfg.simulation.guards.disk_margin =
                s["guards"].value("disk_margin", cfg.simulation.guards.disk_margin);
        }
        if (cfg.simulation.dt <= 0.0 || cfg.simulation.dt > cfg.simulation.T)
            throw ConfigError("config: need 0 < dt <= T");
    }

    if (j.contains("identification")) {
        const auto& i = j["identification"];
        const std::string rule = i.value("rule", "trapezoid");
        if (rule == "trapezoid") cfg.identification.rule = QuadRule::trapezoid;
        else if (rule == "simpson") cfg.identification.rule = QuadRule::simpson;
        else throw ConfigError("config: rule must be 'trapezoid' or 'simpson'");

        const std::string est = i.value("estimator", "data_integral");
        if (est == "data_integral") cfg.identification.estimator = RhsEstimator::data_integral;
        else if (est == "endpoint_thm43")
            cfg.identification.estimator = RhsEstimator::endpoint_thm43;
        else if (est == "endpoint_sec7")
            cfg.identification.estimator = RhsEstimator::endpoint_sec7;
        else throw ConfigError("config: unknown estimator '" + est + "'");

        cfg.identification.svd_rel_tol = i.value("svd_rel_tol", 1e-10);
        cfg.identification.real_theta = i.value("real_theta", false);
        cfg.identification.exact_velocity = i.value("exact_velocity", false);
        cfg.identification.windows = i.value("windows", 10);
        if (cfg.identification.windows < 1) throw ConfigError("config: windows must be >= 1");
        if (cfg.identification.svd_rel_tol < 0.0)
            throw ConfigError("config: svd_rel_tol must be nonnegative");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse failure: " + std::string(e.what()));
    }
    return parse_config(j);
}

/// Identification result serialized to the interchange schema.
inline nlohmann::json result_to_json(const IdentificationResult& res,
                                     const GramSystem* sys = nullptr,
                                     const std::vector<Trajectory>* trajs = nullptr) {
    nlohmann::json out;
    out["theta"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < res.theta.size(); ++i)
        out["theta"].push_back(cfg_detail::complex_json(res.theta(i)));
    out["rank"] = res.rank;
    out["singular_values"] = res.singular_values;
    out["residual"] = res.residual;
    out["estimator"] = res.estimator;
    out["per_trajectory_diagnostics"] = nlohmann::json::array();
    if (sys != nullptr) {
        for (std::size_t t = 0; t < sys->traj_gram_norms.size(); ++t) {
            nlohmann::json d;
            d["gram_norm"] = sys->traj_gram_norms[t];
            d["rhs_norm"] = sys->traj_rhs_norms[t];
            if (trajs != nullptr && t < trajs->size()) {
                d["samples"] = (*trajs)[t].size();
                d["duration"] = (*trajs)[t].duration();
            }
            out["per_trajectory_diagnostics"].push_back(d);
        }
    }
    return out;
}

}  // namespace hardyid
