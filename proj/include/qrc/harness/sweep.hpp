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

// Grid sweep: seeding, per-point evaluation, results.csv / results.meta.json.

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qrc/harness/config.hpp"

namespace qrc::harness {

/// One row of results.csv.
struct SweepRecord {
    double j_s = 0.0;
    double gamma = 0.0;
    double frequency = 0.0;
    int realization = 0;
    std::uint64_t coupling_seed = 0;
    std::uint64_t input_seed = 0;
    TaskKind task = TaskKind::delay;
    bool ok = false;
    std::string error;
    double total = std::nan("");
    int tau_max = -1;
    std::map<int, double> capacity;  // order -> capacity
    std::map<int, double> lambda;
    double en = std::nan("");         // mean over the configured bipartition mode
    double en_all = std::nan("");
    double en_single = std::nan("");
    double cov_dim = std::nan("");
    double stationary_rate = std::nan("");  // of the test input series
    double runtime = 0.0;                   // seconds spent on the (J_s, gamma, f, realization) point
};

// Seed streams. Couplings depend on (J_s, realization) only and inputs on
// (f, realization) only, so curves over gamma or f share disorder draws.
inline std::uint64_t coupling_seed(std::uint64_t base, double j_s, int realization) {
    return hash_combine(hash_combine(hash_combine(base, std::string_view("couplings")), j_s), static_cast<std::uint64_t>(realization));
}
inline std::uint64_t input_seed(std::uint64_t base, double frequency, int realization) {
    return hash_combine(hash_combine(hash_combine(base, std::string_view("input")), frequency), static_cast<std::uint64_t>(realization));
}

inline RunConfig make_run_config(const SweepSpec& s, double j_s, double gamma, int realization) {
    RunConfig c;
    c.reg.n_qubits = s.n_qubits;
    c.hamiltonian.couplings = sample_couplings(j_s, coupling_seed(s.base_seed, j_s, realization), s.n_qubits);
    c.hamiltonian.field = s.field;
    c.gamma = gamma;
    c.jumps = s.jumps;
    c.dt_inject = s.dt_inject;
    c.v_nodes = s.v_nodes;
    c.washout = s.washout;
    c.record_negativity = s.negativity;
    c.record_states = s.pca_enabled;
    c.bipartitions = BipartitionMode::all;  // single-qubit mean is a subset
    c.diagnostic_steps = s.diagnostic_steps;
    return c;
}

inline InputSpec make_input_spec(const SweepSpec& s, double frequency, int realization) {
    InputSpec in;
    in.frequency = frequency;
    in.n_components = s.n_components;
    in.dt_inject = s.dt_inject;
    in.seed = input_seed(s.base_seed, frequency, realization);
    return in;
}

// ---------------------------------------------------------------------------
// CSV schema

inline constexpr int kCapacityColumns = 21;  // c0..c20

inline std::vector<std::string> csv_columns() {
    std::vector<std::string> cols = {"schema_version", "config_hash", "j_s",      "gamma",   "f",      "realization",
                                     "coupling_seed",  "input_seed",  "task",     "status",  "error",  "total",
                                     "tau_max"};
    for (int t = 0; t < kCapacityColumns; ++t) cols.push_back("c" + std::to_string(t));
    for (const char* c : {"lambdas", "en", "en_all", "en_single", "cov_dim", "stationary_rate", "runtime_s"}) cols.emplace_back(c);
    return cols;
}

namespace detail {

inline std::string fmt(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else if (c == '\n' || c == '\r') out += ' ';
        else out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string csv_header() {
    std::string out;
    for (const auto& c : csv_columns()) out += (out.empty() ? "" : ",") + c;
    return out;
}

inline std::string csv_row(const SweepRecord& r, const std::string& hash, bool with_runtime = true) {
    using detail::fmt;
    std::ostringstream os;
    os << kSchemaVersion << ',' << hash << ',' << fmt(r.j_s) << ',' << fmt(r.gamma) << ',' << fmt(r.frequency) << ',' << r.realization << ','
       << r.coupling_seed << ',' << r.input_seed << ',' << to_string(r.task) << ',' << (r.ok ? "ok" : "failed") << ','
       << (r.error.empty() ? "" : detail::quote(r.error)) << ',' << fmt(r.total) << ',' << (r.tau_max >= 0 ? std::to_string(r.tau_max) : "");
    for (int t = 0; t < kCapacityColumns; ++t) {
        const auto it = r.capacity.find(t);
        os << ',' << (it == r.capacity.end() ? "" : fmt(it->second));
    }
    std::string lambdas;
    for (const auto& [t, l] : r.lambda) lambdas += (lambdas.empty() ? "" : ";") + fmt(l);
    os << ',' << lambdas << ',' << fmt(r.en) << ',' << fmt(r.en_all) << ',' << fmt(r.en_single) << ',' << fmt(r.cov_dim) << ','
       << fmt(r.stationary_rate) << ',' << (with_runtime ? fmt(r.runtime) : "");
    return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation of one (J_s, gamma, realization) group across its frequencies

struct SweepGroup {
    double j_s = 0.0;
    double gamma = 0.0;
    int realization = 0;
    std::vector<double> frequencies;
};

inline std::vector<SweepGroup> sweep_groups(const SweepSpec& s) {
    std::vector<SweepGroup> out;
    const auto plane = s.plane();
    for (double j : s.j_s)
        for (double g : s.gamma) {
            std::vector<double> fs;
            for (const auto& [pg, pf] : plane)
                if (pg == g) fs.push_back(pf);
            if (fs.empty()) continue;
            for (int r = 0; r < s.realizations; ++r) out.push_back({j, g, r, fs});
        }
    return out;
}

// PCA anchor stream of one (J_s, gamma, f, realization) point.
inline std::uint64_t pca_seed(const SweepSpec& s, const SweepGroup& g, double f) {
    return hash_combine(hash_combine(hash_combine(input_seed(s.base_seed, f, g.realization), g.j_s), g.gamma), std::string_view("pca"));
}

/// Records for one group, in (f, task) order. Failures are captured per row.
inline std::vector<SweepRecord> evaluate_group(const SweepSpec& s, const SweepGroup& g) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    std::vector<SweepRecord> rows;
    for (double f : g.frequencies)
        for (auto task : s.tasks) {
            SweepRecord r;
            r.j_s = g.j_s;
            r.gamma = g.gamma;
            r.frequency = f;
            r.realization = g.realization;
            r.coupling_seed = coupling_seed(s.base_seed, g.j_s, g.realization);
            r.input_seed = input_seed(s.base_seed, f, g.realization);
            r.task = task;
            rows.push_back(std::move(r));
        }
    auto fail_all = [&](const std::string& msg, std::optional<double> only_f = std::nullopt) {
        for (auto& r : rows)
            if (!only_f || r.frequency == *only_f) {
                r.ok = false;
                if (r.error.empty()) r.error = msg;
            }
    };

    std::vector<Dataset> data;
    try {
        const Reservoir reservoir(make_run_config(s, g.j_s, g.gamma, g.realization));
        std::vector<InputSpec> specs;
        for (double f : g.frequencies) specs.push_back(make_input_spec(s, f, g.realization));
        data = build_datasets(reservoir, specs, s.protocol);
    } catch (const std::exception& e) {
        fail_all(e.what());
        const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
        for (auto& r : rows) r.runtime = elapsed / static_cast<double>(g.frequencies.size());
        return rows;
    }
    const double shared = std::chrono::duration<double>(clock::now() - t0).count() / static_cast<double>(g.frequencies.size());

    const auto single_parts = single_qubit_bipartitions(s.n_qubits);
    for (std::size_t fi = 0; fi < g.frequencies.size(); ++fi) {
        const auto tf = clock::now();
        const double f = g.frequencies[fi];
        const auto& d = data[fi];
        double en_all = std::nan(""), en_single = std::nan(""), dim = std::nan("");
        std::string diag_error;
        try {
            if (s.negativity && !d.test_diagnostics.negativity.empty()) {
                double sa = 0.0, ss = 0.0;
                for (const auto& rec : d.test_diagnostics.negativity) {
                    sa += rec.mean;
                    double acc = 0.0;
                    for (const auto& p : single_parts) acc += rec.per_bipartition.at(p);
                    ss += acc / static_cast<double>(single_parts.size());
                }
                en_all = sa / static_cast<double>(d.test_diagnostics.negativity.size());
                en_single = ss / static_cast<double>(d.test_diagnostics.negativity.size());
            }
            if (s.pca_enabled) {
                PcaConfig cfg = s.pca;
                cfg.seed = pca_seed(s, g, f);
                dim = covariance_dimension(TrajectoryEmbedding::from_states(d.test_diagnostics.states), cfg);
            }
        } catch (const std::exception& e) {
            diag_error = std::string("diagnostics: ") + e.what();
        }
        const double rate = d.test_s.size() > 2 ? stationary_point_rate(d.test_s.values) : std::nan("");
        const double diag_time = std::chrono::duration<double>(clock::now() - tf).count();

        for (auto& r : rows) {
            if (r.frequency != f) continue;
            const auto tt = clock::now();
            r.en_all = en_all;
            r.en_single = en_single;
            r.en = s.bipartitions == BipartitionMode::all ? en_all : en_single;
            r.cov_dim = dim;
            r.stationary_rate = rate;
            try {
                const auto rep = evaluate_capacity(d, r.task, s.protocol);
                r.total = rep.total;
                r.tau_max = rep.tau_max;
                r.capacity = rep.per_tau;
                r.lambda = rep.lambda;
                r.ok = diag_error.empty();
                r.error = diag_error;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
            r.runtime = shared + diag_time / static_cast<double>(s.tasks.size()) + std::chrono::duration<double>(clock::now() - tt).count();
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Output

inline nlohmann::json sweep_meta(const SweepSpec& s) {
    nlohmann::json m;
    m["schema_version"] = kSchemaVersion;
    m["config_hash"] = config_hash(s);
    m["config"] = to_json(s);
    m["columns"] = csv_columns();
    m["transition_region"] = {{"h_over_js", {kTransitionRatioLow, kTransitionRatioHigh}},
                              {"j_s", {s.transition_js_low(), s.transition_js_high()}}};
    m["notes"] = {
        "one row per (j_s, gamma, f, realization, task); status 'failed' rows carry the error text",
        "c<k>: capacity of order k; delay uses k = 0..tau_max, narma uses k = 1..tau_max (c0 empty)",
        "total: sum of the row's capacities (early stop after protocol.stop_run orders below protocol.stop_threshold)",
        "en_all / en_single: time-averaged mean log-negativity over all / single-qubit bipartitions of the test run, "
        "sampled every dt_inject / v_nodes during the first diagnostic_steps post-washout injections; en repeats the configured mode",
        "cov_dim: local-PCA covariance dimension of the same sampled test trajectory",
        "stationary_rate: sign changes of the first difference of the test input per step, for frequency rescaling",
        "couplings seeded from (base_seed, j_s, realization); inputs from (base_seed, f, realization)",
        "runtime_s is the only field that varies between identical runs"};
    return m;
}

/// Collects rows from workers and appends them to the CSV in group order, so
/// the file content does not depend on scheduling.
class OrderedAppender {
public:
    OrderedAppender(std::ostream* os, std::string hash) : os_(os), hash_(std::move(hash)) {}

    void submit(std::size_t index, std::vector<SweepRecord> rows) {
        std::lock_guard lock(mu_);
        pending_.emplace(index, std::move(rows));
        while (!pending_.empty() && pending_.begin()->first == next_) {
            for (auto& r : pending_.begin()->second) {
                if (os_) *os_ << csv_row(r, hash_) << '\n';
                if (!r.ok) ++failed_;
                all_.push_back(std::move(r));
            }
            if (os_) os_->flush();
            pending_.erase(pending_.begin());
            ++next_;
        }
    }

    [[nodiscard]] std::vector<SweepRecord> take() { return std::move(all_); }
    [[nodiscard]] std::size_t failed() const { return failed_; }

private:
    std::ostream* os_;
    std::string hash_;
    std::mutex mu_;
    std::map<std::size_t, std::vector<SweepRecord>> pending_;
    std::size_t next_ = 0;
    std::vector<SweepRecord> all_;
    std::size_t failed_ = 0;
};

struct SweepOutcome {
    std::vector<SweepRecord> records;
    std::size_t failed = 0;
    std::string config_hash;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every group on a pool of `spec.threads` workers. When `out_dir` is set,
/// writes results.meta.json up front and appends results.csv as groups finish.
inline SweepOutcome run_sweep(const SweepSpec& spec, const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                              const ProgressFn& progress = {}) {
    spec.validate();
    const std::string hash = config_hash(spec);
    std::ofstream csv;
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        std::ofstream meta(*out_dir / "results.meta.json");
        if (!meta) throw Error("cannot write " + (*out_dir / "results.meta.json").string());
        meta << sweep_meta(spec).dump(2) << '\n';
        csv.open(*out_dir / "results.csv");
        if (!csv) throw Error("cannot write " + (*out_dir / "results.csv").string());
        csv << csv_header() << '\n';
        csv.flush();
    }
    const auto groups = sweep_groups(spec);
    OrderedAppender appender(out_dir ? &csv : nullptr, hash);
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex progress_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < groups.size(); i = next++) {
            std::vector<SweepRecord> rows;
            try {
                rows = evaluate_group(spec, groups[i]);
            } catch (const std::exception& e) {
                // evaluate_group isolates failures itself; this guards allocation errors and the like
                SweepRecord r;
                r.j_s = groups[i].j_s;
                r.gamma = groups[i].gamma;
                r.realization = groups[i].realization;
                r.error = e.what();
                rows.push_back(r);
            }
            appender.submit(i, std::move(rows));
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(progress_mu);
                progress(d, groups.size());
            }
        }
    };
    const int n_threads = std::min<int>(spec.threads, static_cast<int>(std::max<std::size_t>(groups.size(), 1)));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    return {appender.take(), appender.failed(), hash};
}

}  // namespace qrc::harness
