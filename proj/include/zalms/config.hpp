#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zalms/errors.hpp"
#include "zalms/signals.hpp"

namespace zalms {

/**
 * Experiment configuration: JSON schema, defaults, and validation.
 *
 * The JSON layout is
 *
 *   {
 *     "plant":       {"w_star": [..], "noise_var": 0.01},
 *     "input":       {"ar_coeff": 0.6, "innovation_var": 0.64},
 *     "algo":        {"mu": 0.01, "lambda": 0.01},
 *     "run":         {"iters": 1000, "runs": 500, "master_seed": 1, "mc": true},
 *     "models":      ["exact", "baseline"],
 *     "joint_dumps": [{"i": 3, "j": 8, "at_iter": 800, "samples": 5000}]
 *   }
 *
 * Every field is optional: missing fields take the default desk-scale
 * values below (the sparse 17-tap plant driven by a correlated AR(1)
 * input).  Unknown keys are rejected with their full key path.  A file
 * whose top level contains a "config" member is treated as a run manifest
 * and its embedded configuration is loaded, so a previous run can be
 * reproduced directly from its manifest.
 */

/// One requested joint weight-error dump: record (werr_i, werr_j) over the
/// first `samples` runs at iteration at_iter (samples = 0 means all runs).
struct JointDumpSpec {
    std::size_t i = 0;
    std::size_t j = 0;
    std::uint64_t at_iter = 0;
    std::uint64_t samples = 0;
};

struct ExperimentConfig {
    PlantSpec plant;
    InputModel input;
    double mu = 0.01;
    double lambda = 0.01;
    std::uint64_t iters = 1000;
    std::uint64_t runs = 500;
    std::uint64_t master_seed = 1;
    bool mc = true;
    bool run_exact = true;
    bool run_baseline = true;
    std::vector<JointDumpSpec> joint_dumps;
};

/// Default configuration: sparse 17-tap plant (five positive taps, seven
/// zeros, five mirrored negative taps), unit-variance AR(1) input with
/// coefficient 0.6, noise variance 0.01, mu = 0.01, lambda = 0.01,
/// 500 runs of 1000 iterations, both model kinds, no joint dumps.
inline ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.plant.w_star = {0.8,  0.5,  0.3,  0.1,  0.05, 0.0,  0.0,  0.0, 0.0,
                        0.0,  0.0,  0.0,  -0.05, -0.1, -0.3, -0.5, -0.8};
    cfg.plant.noise_var = 0.01;
    cfg.input.ar_coeff = 0.6;
    cfg.input.innovation_var = 0.64;
    return cfg;
}

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path, const std::string& message) {
    throw config_error("config: " + path + ": " + message);
}

inline void check_keys(const nlohmann::json& obj,
                       std::initializer_list<const char*> allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known)
            throw config_error("config: unknown key '" +
                               (path.empty() ? it.key() : path + "." + it.key()) + "'");
    }
}

inline const nlohmann::json& as_object(const nlohmann::json& v, const std::string& path) {
    if (!v.is_object()) config_fail(path, "expected an object");
    return v;
}

inline double as_finite_double(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) config_fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_fail(path, "must be finite");
    return d;
}

inline std::uint64_t as_uint(const nlohmann::json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const std::int64_t s = v.get<std::int64_t>();
        if (s < 0) config_fail(path, "must be >= 0");
        return static_cast<std::uint64_t>(s);
    }
    config_fail(path, "expected a nonnegative integer");
}

inline bool as_bool(const nlohmann::json& v, const std::string& path) {
    if (!v.is_boolean()) config_fail(path, "expected a boolean");
    return v.get<bool>();
}

} // namespace detail

/// Overlay a parsed JSON config object onto `cfg` and validate the result.
/// All diagnostics carry the offending key path.
inline void apply_config_json(const nlohmann::json& root, ExperimentConfig& cfg) {
    using detail::as_bool;
    using detail::as_finite_double;
    using detail::as_object;
    using detail::as_uint;
    using detail::check_keys;
    using detail::config_fail;

    as_object(root, "(top level)");
    check_keys(root, {"plant", "input", "algo", "run", "models", "joint_dumps"}, "");

    if (root.contains("plant")) {
        const nlohmann::json& plant = as_object(root["plant"], "plant");
        check_keys(plant, {"w_star", "noise_var"}, "plant");
        if (plant.contains("w_star")) {
            const nlohmann::json& w = plant["w_star"];
            if (!w.is_array() || w.empty())
                config_fail("plant.w_star", "expected a nonempty array of numbers");
            Vec w_star;
            w_star.reserve(w.size());
            for (std::size_t k = 0; k < w.size(); ++k)
                w_star.push_back(
                    as_finite_double(w[k], "plant.w_star[" + std::to_string(k) + "]"));
            cfg.plant.w_star = std::move(w_star);
        }
        if (plant.contains("noise_var")) {
            cfg.plant.noise_var = as_finite_double(plant["noise_var"], "plant.noise_var");
            if (cfg.plant.noise_var < 0.0) config_fail("plant.noise_var", "must be >= 0");
        }
    }

    if (root.contains("input")) {
        const nlohmann::json& input = as_object(root["input"], "input");
        check_keys(input, {"ar_coeff", "innovation_var"}, "input");
        if (input.contains("ar_coeff")) {
            cfg.input.ar_coeff = as_finite_double(input["ar_coeff"], "input.ar_coeff");
            if (!(std::abs(cfg.input.ar_coeff) < 1.0))
                config_fail("input.ar_coeff", "must satisfy |ar_coeff| < 1 (stationary)");
        }
        if (input.contains("innovation_var")) {
            cfg.input.innovation_var =
                as_finite_double(input["innovation_var"], "input.innovation_var");
            if (!(cfg.input.innovation_var > 0.0))
                config_fail("input.innovation_var", "must be > 0");
        }
    }

    if (root.contains("algo")) {
        const nlohmann::json& algo = as_object(root["algo"], "algo");
        check_keys(algo, {"mu", "lambda"}, "algo");
        if (algo.contains("mu")) {
            cfg.mu = as_finite_double(algo["mu"], "algo.mu");
            if (!(cfg.mu > 0.0)) config_fail("algo.mu", "must be > 0");
        }
        if (algo.contains("lambda")) {
            cfg.lambda = as_finite_double(algo["lambda"], "algo.lambda");
            if (cfg.lambda < 0.0) config_fail("algo.lambda", "must be >= 0");
        }
    }

    if (root.contains("run")) {
        const nlohmann::json& run = as_object(root["run"], "run");
        check_keys(run, {"iters", "runs", "master_seed", "mc"}, "run");
        if (run.contains("iters")) {
            cfg.iters = as_uint(run["iters"], "run.iters");
            if (cfg.iters < 1) config_fail("run.iters", "must be >= 1");
        }
        if (run.contains("runs")) {
            cfg.runs = as_uint(run["runs"], "run.runs");
            if (cfg.runs < 1) config_fail("run.runs", "must be >= 1");
        }
        if (run.contains("master_seed"))
            cfg.master_seed = as_uint(run["master_seed"], "run.master_seed");
        if (run.contains("mc")) cfg.mc = as_bool(run["mc"], "run.mc");
    }

    if (root.contains("models")) {
        const nlohmann::json& models = root["models"];
        if (!models.is_array() || models.empty())
            config_fail("models", "expected a nonempty array of model names");
        bool exact = false, baseline = false;
        for (std::size_t k = 0; k < models.size(); ++k) {
            const std::string path = "models[" + std::to_string(k) + "]";
            if (!models[k].is_string()) config_fail(path, "expected a string");
            const std::string name = models[k].get<std::string>();
            if (name == "exact")
                exact = true;
            else if (name == "baseline")
                baseline = true;
            else
                config_fail(path, "unknown model '" + name + "' (expected exact or baseline)");
        }
        cfg.run_exact = exact;
        cfg.run_baseline = baseline;
    }

    if (root.contains("joint_dumps")) {
        const nlohmann::json& dumps = root["joint_dumps"];
        if (!dumps.is_array()) config_fail("joint_dumps", "expected an array");
        cfg.joint_dumps.clear();
        for (std::size_t k = 0; k < dumps.size(); ++k) {
            const std::string path = "joint_dumps[" + std::to_string(k) + "]";
            const nlohmann::json& d = as_object(dumps[k], path);
            check_keys(d, {"i", "j", "at_iter", "samples"}, path);
            JointDumpSpec spec;
            if (!d.contains("i") || !d.contains("j") || !d.contains("at_iter"))
                config_fail(path, "requires i, j, and at_iter");
            spec.i = static_cast<std::size_t>(as_uint(d["i"], path + ".i"));
            spec.j = static_cast<std::size_t>(as_uint(d["j"], path + ".j"));
            spec.at_iter = as_uint(d["at_iter"], path + ".at_iter");
            if (d.contains("samples")) {
                spec.samples = as_uint(d["samples"], path + ".samples");
                if (spec.samples < 1) config_fail(path + ".samples", "must be >= 1");
            }
            cfg.joint_dumps.push_back(spec);
        }
    }

    // Cross-field validation against the fully resolved values.
    const std::size_t L = cfg.plant.length();
    for (std::size_t k = 0; k < cfg.joint_dumps.size(); ++k) {
        const std::string path = "joint_dumps[" + std::to_string(k) + "]";
        const JointDumpSpec& d = cfg.joint_dumps[k];
        if (d.i >= L) config_fail(path + ".i", "index out of range for a plant of length " +
                                                   std::to_string(L));
        if (d.j >= L) config_fail(path + ".j", "index out of range for a plant of length " +
                                                   std::to_string(L));
        if (d.at_iter > cfg.iters)
            config_fail(path + ".at_iter", "exceeds run.iters (" + std::to_string(cfg.iters) +
                                               ")");
    }
    if (!cfg.run_exact && !cfg.run_baseline)
        config_fail("models", "at least one model must be selected");
}

/// Load a configuration file: a config object, or a run manifest whose
/// "config" member is the full resolved configuration of a previous run.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();

    nlohmann::json root;
    try {
        root = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("config: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!root.is_object())
        throw config_error("config: '" + path + "': top level must be an object");
    if (root.contains("config")) root = root["config"]; // manifest shape

    ExperimentConfig cfg = default_config();
    apply_config_json(root, cfg);
    return cfg;
}

/// Full resolved configuration as JSON (every field explicit), suitable for
/// the run manifest and for reloading with load_config.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["plant"]["w_star"] = cfg.plant.w_star;
    j["plant"]["noise_var"] = cfg.plant.noise_var;
    j["input"]["ar_coeff"] = cfg.input.ar_coeff;
    j["input"]["innovation_var"] = cfg.input.innovation_var;
    j["algo"]["mu"] = cfg.mu;
    j["algo"]["lambda"] = cfg.lambda;
    j["run"]["iters"] = cfg.iters;
    j["run"]["runs"] = cfg.runs;
    j["run"]["master_seed"] = cfg.master_seed;
    j["run"]["mc"] = cfg.mc;
    nlohmann::ordered_json models = nlohmann::ordered_json::array();
    if (cfg.run_exact) models.push_back("exact");
    if (cfg.run_baseline) models.push_back("baseline");
    j["models"] = std::move(models);
    nlohmann::ordered_json dumps = nlohmann::ordered_json::array();
    for (const JointDumpSpec& d : cfg.joint_dumps) {
        nlohmann::ordered_json item;
        item["i"] = d.i;
        item["j"] = d.j;
        item["at_iter"] = d.at_iter;
        if (d.samples > 0) item["samples"] = d.samples;
        dumps.push_back(std::move(item));
    }
    j["joint_dumps"] = std::move(dumps);
    return j;
}

} // namespace zalms
