// Copyright 2026 The qrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sweep configuration: JSON schema, defaults and the config hash.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qrc/pca.hpp"
#include "qrc/train_eval.hpp"

namespace qrc::harness {

inline constexpr int kSchemaVersion = 1;

// Transition region of the disordered Ising chain in units of the coupling
// scale: h / J_s in [0.2, 1], i.e. J_s in [2, 10] at h = 2. Literature values,
// carried as constants, not recomputed.
inline constexpr double kTransitionRatioLow = 0.2;
inline constexpr double kTransitionRatioHigh = 1.0;

/// Raised for malformed configuration (maps to the usage exit code).
class ConfigError : public Error {
public:
    using Error::Error;
};

struct SweepSpec {
    int schema_version = kSchemaVersion;
    std::vector<double> j_s = log_grid(0.02, 20.0, 24);
    std::vector<double> gamma = {0.0, 0.01, 0.05};
    std::vector<double> frequency = {0.2, 1.0, 5.0, kInfiniteFrequency};
    // Optional restriction of the (gamma, f) plane to these pairs; empty = full product.
    std::vector<std::pair<double, double>> pairs;
    int realizations = 10;
    std::uint64_t base_seed = 1;

    int n_qubits = 4;
    double field = 2.0;
    double dt_inject = 2.5;
    int v_nodes = 10;
    int washout = 100;
    int n_components = 20;
    JumpSet jumps = JumpSet::both;
    BipartitionMode bipartitions = BipartitionMode::all;
    std::vector<TaskKind> tasks = {TaskKind::delay, TaskKind::narma};
    CapacityProtocol protocol;

    int diagnostic_steps = 500;  // post-washout injections with negativity/state sampling
    bool negativity = true;
    bool pca_enabled = true;
    PcaConfig pca;

    int threads = 1;

    [[nodiscard]] double transition_js_low() const { return field / kTransitionRatioHigh; }
    [[nodiscard]] double transition_js_high() const { return field / kTransitionRatioLow; }

    /// (gamma, f) pairs to run, in grid order.
    [[nodiscard]] std::vector<std::pair<double, double>> plane() const {
        std::vector<std::pair<double, double>> out;
        for (double g : gamma)
            for (double f : frequency) {
                if (!pairs.empty()) {
                    bool listed = false;
                    for (const auto& [pg, pf] : pairs) listed = listed || (pg == g && pf == f);
                    if (!listed) continue;
                }
                out.emplace_back(g, f);
            }
        return out;
    }

    void validate() const {
        if (schema_version != kSchemaVersion)
            throw ConfigError("unsupported schema_version " + std::to_string(schema_version) + " (expected " + std::to_string(kSchemaVersion) + ")");
        if (j_s.empty() || gamma.empty() || frequency.empty()) throw ConfigError("sweep grid is empty");
        for (double v : j_s)
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("J_s grid values must be finite and > 0");
        for (double v : gamma)
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("gamma grid values must be finite and >= 0");
        for (double v : frequency)
            if (!(v > 0.0)) throw ConfigError("frequency grid values must be > 0 (inf for random input)");
        if (plane().empty()) throw ConfigError("no (gamma, f) pair survives the pair filter");
        if (realizations < 1) throw ConfigError("realizations must be >= 1");
        if (tasks.empty()) throw ConfigError("task list is empty");
        if (diagnostic_steps < 0) throw ConfigError("diagnostic_steps must be >= 0");
        if (threads < 1) throw ConfigError("threads must be >= 1");
        try {
            RegisterSpec{n_qubits, 1}.validate();
            protocol.validate();
            pca.validate();
        } catch (const InvalidSpecError& e) {
            throw ConfigError(e.what());
        }
        if (!(field >= 0.0) || !(dt_inject > 0.0) || v_nodes < 1 || washout < 0 || n_components < 1)
            throw ConfigError("invalid reservoir parameters");
        if (pca_enabled && diagnostic_steps * v_nodes < pca.d + 1 && diagnostic_steps != 0)
            throw ConfigError("diagnostic window too short for the PCA cluster size");
    }
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json number_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

inline double number_from(const nlohmann::json& j, const std::string& key) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return kInfiniteFrequency;
        throw ConfigError("'" + key + "': expected a number or \"inf\", got \"" + s + "\"");
    }
    if (!j.is_number()) throw ConfigError("'" + key + "': expected a number");
    return j.get<double>();
}

inline std::vector<double> numbers_from(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("'" + key + "': expected an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number_from(v, key));
    return out;
}

// A grid is either an explicit array or {"log": [lo, hi, points]} / {"linear": [lo, hi, points]}.
inline std::vector<double> grid_from(const nlohmann::json& j, const std::string& key) {
    if (j.is_array()) return numbers_from(j, key);
    if (j.is_object() && j.size() == 1) {
        const auto& [kind, args] = *j.items().begin();
        if (!args.is_array() || args.size() != 3) throw ConfigError("'" + key + "." + kind + "': expected [lo, hi, points]");
        const double lo = number_from(args[0], key), hi = number_from(args[1], key);
        const int points = args[2].get<int>();
        if (points < 1) return {};
        if (kind == "log") {
            try {
                return log_grid(lo, hi, points);
            } catch (const InvalidSpecError& e) {
                throw ConfigError("'" + key + "': " + e.what());
            }
        }
        if (kind == "linear") {
            std::vector<double> out;
            for (int i = 0; i < points; ++i) out.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
            return out;
        }
    }
    throw ConfigError("'" + key + "': expected an array or {\"log\"|\"linear\": [lo, hi, points]}");
}

template <typename T>
void read_into(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("'") + key + "': " + e.what());
    }
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

}  // namespace detail

inline nlohmann::json to_json(const SweepSpec& s) {
    using nlohmann::json;
    json grid;
    grid["j_s"] = s.j_s;
    grid["gamma"] = s.gamma;
    json freqs = json::array();
    for (double f : s.frequency) freqs.push_back(detail::number_json(f));
    grid["frequency"] = freqs;
    json pairs = json::array();
    for (const auto& [g, f] : s.pairs) pairs.push_back(json::array({g, detail::number_json(f)}));
    grid["pairs"] = pairs;

    json tasks = json::array();
    for (auto t : s.tasks) tasks.push_back(to_string(t));

    json protocol;
    protocol["tau_max"] = s.protocol.tau_max;
    protocol["stop_threshold"] = s.protocol.stop_threshold;
    protocol["stop_run"] = s.protocol.stop_run;
    protocol["lambda_grid"] = s.protocol.lambda_grid;
    protocol["validation_fraction"] = s.protocol.validation_fraction;
    protocol["n_train"] = s.protocol.n_train;
    protocol["train_steps"] = s.protocol.train_steps;
    protocol["test_steps"] = s.protocol.test_steps;

    json pca;
    pca["enabled"] = s.pca_enabled;
    pca["d"] = s.pca.d;
    pca["epsilon"] = s.pca.epsilon;
    pca["iterations"] = s.pca.iterations;

    json out;
    out["schema_version"] = s.schema_version;
    out["grid"] = grid;
    out["realizations"] = s.realizations;
    out["base_seed"] = s.base_seed;
    out["n_qubits"] = s.n_qubits;
    out["field"] = s.field;
    out["dt_inject"] = s.dt_inject;
    out["v_nodes"] = s.v_nodes;
    out["washout"] = s.washout;
    out["n_components"] = s.n_components;
    out["jumps"] = to_string(s.jumps);
    out["bipartitions"] = to_string(s.bipartitions);
    out["tasks"] = tasks;
    out["protocol"] = protocol;
    out["diagnostic_steps"] = s.diagnostic_steps;
    out["negativity"] = s.negativity;
    out["pca"] = pca;
    return out;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    using detail::read_into;
    if (!j.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown(j,
                           {"schema_version", "grid", "realizations", "base_seed", "n_qubits", "field", "dt_inject", "v_nodes",
                            "washout", "n_components", "jumps", "bipartitions", "tasks", "protocol", "diagnostic_steps",
                            "negativity", "pca", "threads"},
                           "config");
    SweepSpec s;
    read_into(j, "schema_version", s.schema_version);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        detail::reject_unknown(g, {"j_s", "gamma", "frequency", "pairs"}, "grid");
        if (g.contains("j_s")) s.j_s = detail::grid_from(g.at("j_s"), "grid.j_s");
        if (g.contains("gamma")) s.gamma = detail::grid_from(g.at("gamma"), "grid.gamma");
        if (g.contains("frequency")) s.frequency = detail::numbers_from(g.at("frequency"), "grid.frequency");
        if (g.contains("pairs")) {
            s.pairs.clear();
            for (const auto& p : g.at("pairs")) {
                if (!p.is_array() || p.size() != 2) throw ConfigError("grid.pairs entries must be [gamma, f]");
                s.pairs.emplace_back(detail::number_from(p[0], "grid.pairs"), detail::number_from(p[1], "grid.pairs"));
            }
        }
    }
    read_into(j, "realizations", s.realizations);
    read_into(j, "base_seed", s.base_seed);
    read_into(j, "n_qubits", s.n_qubits);
    read_into(j, "field", s.field);
    read_into(j, "dt_inject", s.dt_inject);
    read_into(j, "v_nodes", s.v_nodes);
    read_into(j, "washout", s.washout);
    read_into(j, "n_components", s.n_components);
    read_into(j, "diagnostic_steps", s.diagnostic_steps);
    read_into(j, "negativity", s.negativity);
    read_into(j, "threads", s.threads);
    try {
        if (j.contains("jumps")) s.jumps = parse_jump_set(j.at("jumps").get<std::string>());
        if (j.contains("bipartitions")) s.bipartitions = parse_bipartition_mode(j.at("bipartitions").get<std::string>());
        if (j.contains("tasks")) {
            s.tasks.clear();
            for (const auto& t : j.at("tasks")) s.tasks.push_back(parse_task_kind(t.get<std::string>()));
        }
    } catch (const InvalidSpecError& e) {
        throw ConfigError(e.what());
    }
    if (j.contains("protocol")) {
        const auto& p = j.at("protocol");
        detail::reject_unknown(p,
                               {"tau_max", "stop_threshold", "stop_run", "lambda_grid", "validation_fraction", "n_train",
                                "train_steps", "test_steps"},
                               "protocol");
        read_into(p, "tau_max", s.protocol.tau_max);
        read_into(p, "stop_threshold", s.protocol.stop_threshold);
        read_into(p, "stop_run", s.protocol.stop_run);
        if (p.contains("lambda_grid")) s.protocol.lambda_grid = detail::grid_from(p.at("lambda_grid"), "protocol.lambda_grid");
        read_into(p, "validation_fraction", s.protocol.validation_fraction);
        read_into(p, "n_train", s.protocol.n_train);
        read_into(p, "train_steps", s.protocol.train_steps);
        read_into(p, "test_steps", s.protocol.test_steps);
    }
    if (j.contains("pca")) {
        const auto& p = j.at("pca");
        detail::reject_unknown(p, {"enabled", "d", "epsilon", "iterations"}, "pca");
        read_into(p, "enabled", s.pca_enabled);
        read_into(p, "d", s.pca.d);
        read_into(p, "epsilon", s.pca.epsilon);
        read_into(p, "iterations", s.pca.iterations);
    }
    return s;
}

inline SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return sweep_spec_from_json(j);
}

/// FNV-1a over the canonical (sorted-key, compact) JSON of every parameter,
/// defaults included. Threads do not affect results and are left out.
inline std::string config_hash(const SweepSpec& s) {
    const std::string text = to_json(s).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

}  // namespace qrc::harness
