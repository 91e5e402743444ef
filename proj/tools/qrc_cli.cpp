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

// qrc: run / sweep / report / validate.
//
// Exit codes: 0 success, 1 numeric failure in single-run mode (or a failed
// self-check), 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qrc/harness/report.hpp"
#include "qrc/harness/sweep.hpp"
#include "qrc/harness/validate.hpp"

namespace fs = std::filesystem;
using namespace qrc;
using namespace qrc::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> jumps;
    std::optional<std::string> bipartitions;
    std::optional<int> v_nodes;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_threads) {
    cmd->add_option("--config", f.config, "JSON config file (missing keys take defaults)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "base seed");
    if (with_threads) cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--jumps", f.jumps, "jump operators: both | lower | raise");
    cmd->add_option("--bipartitions", f.bipartitions, "negativity average: all | single-qubit");
    cmd->add_option("--v-nodes", f.v_nodes, "virtual nodes per injection")->check(CLI::PositiveNumber);
}

SweepSpec resolve_spec(const CommonFlags& f) {
    SweepSpec s = f.config.empty() ? SweepSpec{} : load_sweep_spec(f.config);
    try {
        if (f.seed) s.base_seed = *f.seed;
        if (f.threads) s.threads = *f.threads;
        if (f.jumps) s.jumps = parse_jump_set(*f.jumps);
        if (f.bipartitions) s.bipartitions = parse_bipartition_mode(*f.bipartitions);
        if (f.v_nodes) s.v_nodes = *f.v_nodes;
    } catch (const InvalidSpecError& e) {
        throw ConfigError(e.what());
    }
    return s;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

struct RunFlags {
    double j_s = 1.0;
    double gamma = 0.01;
    std::string frequency = "0.2";
    int steps = 400;
    int realization = 0;
    bool no_capacity = false;
};

int cmd_run(const CommonFlags& cf, const RunFlags& rf) {
    SweepSpec s = resolve_spec(cf);
    double f = 0.0;
    try {
        f = rf.frequency == "inf" ? kInfiniteFrequency : std::stod(rf.frequency);
    } catch (const std::exception&) {
        throw ConfigError("--frequency: expected a number or inf, got '" + rf.frequency + "'");
    }
    s.j_s = {rf.j_s};
    s.gamma = {rf.gamma};
    s.frequency = {f};
    s.pairs.clear();
    s.validate();
    if (rf.steps <= s.washout) throw ConfigError("--steps must exceed the washout (" + std::to_string(s.washout) + ")");

    const fs::path out = cf.out.empty() ? fs::path("run_out") : fs::path(cf.out);
    fs::create_directories(out);

    RunConfig cfg = make_run_config(s, rf.j_s, rf.gamma, rf.realization);
    cfg.record_negativity = true;
    cfg.bipartitions = s.bipartitions;
    cfg.record_states = s.pca_enabled;
    cfg.diagnostic_steps = 0;
    InputSpec in = make_input_spec(s, f, rf.realization);
    in.k_steps = static_cast<std::size_t>(rf.steps);

    const Reservoir reservoir(cfg);
    const InputSeries input = gen_input(in);
    const RunResult run = reservoir.run(input);
    write_input_csv(input, (out / "input.csv").string());
    write_readout_csv(run.readout, cfg.dt_inject, (out / "readout.csv").string());
    write_negativity_csv(run.diagnostics.negativity, run.diagnostics.sample_interval, (out / "negativity.csv").string());

    nlohmann::json summary;
    summary["j_s"] = rf.j_s;
    summary["gamma"] = rf.gamma;
    summary["f"] = harness::detail::number_json(f);
    summary["realization"] = rf.realization;
    summary["coupling_seed"] = coupling_seed(s.base_seed, rf.j_s, rf.realization);
    summary["input_seed"] = in.seed;
    summary["steps"] = rf.steps;
    summary["config"] = to_json(s);
    summary["bipartitions"] = std::string(to_string(s.bipartitions));
    summary["mean_log_negativity"] = trajectory_mean_negativity(run.diagnostics.negativity, 0);
    if (s.pca_enabled) {
        PcaConfig pc = s.pca;
        pc.seed = hash_combine(in.seed, std::string_view("pca"));
        summary["covariance_dimension"] = covariance_dimension(TrajectoryEmbedding::from_states(run.diagnostics.states), pc);
    }
    if (!rf.no_capacity) {
        const Dataset data = build_dataset(reservoir, in, s.protocol);
        for (auto task : s.tasks) {
            const auto rep = evaluate_capacity(data, task, s.protocol);
            nlohmann::json t;
            t["total"] = rep.total;
            t["tau_max"] = rep.tau_max;
            t["stopped_early"] = rep.stopped_early;
            for (const auto& [k, c] : rep.per_tau) t["per_order"][std::to_string(k)] = c;
            for (const auto& [k, l] : rep.lambda) t["lambda"][std::to_string(k)] = l;
            summary["capacity"][std::string(to_string(task))] = t;
        }
    }
    write_json(out / "summary.json", summary);
    std::cout << "wrote input.csv, readout.csv, negativity.csv, summary.json to " << out.string() << '\n';
    if (summary.contains("capacity"))
        for (const auto& [task, t] : summary["capacity"].items())
            std::cout << "  " << task << " total capacity " << t["total"].get<double>() << '\n';
    std::cout << "  mean log-negativity " << summary["mean_log_negativity"].get<double>() << '\n';
    return kExitOk;
}

int cmd_sweep(const CommonFlags& cf, bool quiet) {
    const SweepSpec s = resolve_spec(cf);
    s.validate();
    const fs::path out = cf.out.empty() ? fs::path("results") : fs::path(cf.out);
    const auto groups = sweep_groups(s).size();
    std::cerr << "sweep: " << groups << " groups, config " << config_hash(s) << ", " << s.threads << " thread(s)\n";
    ProgressFn progress;
    if (!quiet)
        progress = [](std::size_t done, std::size_t total) {
            std::fprintf(stderr, "\r  %zu/%zu", done, total);
            if (done == total) std::fputc('\n', stderr);
        };
    const auto outcome = run_sweep(s, out, progress);
    std::cout << "wrote " << outcome.records.size() << " rows to " << (out / "results.csv").string();
    if (outcome.failed) std::cout << " (" << outcome.failed << " failed)";
    std::cout << '\n';
    return kExitOk;
}

int cmd_report(const std::string& in_path, const std::string& out_dir) {
    fs::path in = in_path.empty() ? fs::path("results") : fs::path(in_path);
    if (fs::is_directory(in)) in /= "results.csv";
    const auto rows = read_results(in.string());
    if (rows.empty()) throw SchemaError("no data rows in " + in.string());
    double lo = 2.0, hi = 10.0;
    const fs::path meta = in.parent_path() / "results.meta.json";
    if (fs::exists(meta)) {
        std::ifstream is(meta);
        const auto m = nlohmann::json::parse(is, nullptr, false);
        if (!m.is_discarded() && m.contains("transition_region")) {
            lo = m["transition_region"]["j_s"][0].get<double>();
            hi = m["transition_region"]["j_s"][1].get<double>();
        }
    }
    const auto curves = aggregate(rows);
    const fs::path out = out_dir.empty() ? in.parent_path() : fs::path(out_dir);
    if (!out.empty()) fs::create_directories(out);
    {
        std::ofstream os(out / "summary.csv");
        write_summary_csv(curves, os);
    }
    {
        std::ofstream os(out / "correlations.csv");
        write_correlations_csv(curves, os);
    }
    {
        std::ofstream os(out / "report.txt");
        write_text_report(curves, os, lo, hi);
    }
    write_text_report(curves, std::cout, lo, hi);
    return kExitOk;
}

int cmd_validate(std::uint64_t seed) {
    int failed = 0;
    for (const auto& c : run_validation(seed)) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  (" << c.detail << ")\n";
        failed += c.pass ? 0 : 1;
    }
    std::cout << (failed ? std::to_string(failed) + " check(s) failed\n" : "all checks passed\n");
    return failed ? kExitNumeric : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative spin-network reservoir simulator"};
    app.require_subcommand(1);

    CommonFlags run_common, sweep_common;
    RunFlags rf;
    auto* run = app.add_subcommand("run", "single parameter point with input, readout and negativity traces");
    add_common(run, run_common, false);
    run->add_option("--js", rf.j_s, "coupling scale J_s")->check(CLI::PositiveNumber);
    run->add_option("--gamma", rf.gamma, "dissipation rate")->check(CLI::NonNegativeNumber);
    run->add_option("--frequency", rf.frequency, "input frequency scale, or inf for random input");
    run->add_option("--steps", rf.steps, "injections in the traced run (washout included)");
    run->add_option("--realization", rf.realization, "disorder realization index")->check(CLI::NonNegativeNumber);
    run->add_flag("--no-capacity", rf.no_capacity, "skip the capacity evaluation");

    bool quiet = false;
    auto* sweep = app.add_subcommand("sweep", "grid sweep to results.csv and results.meta.json");
    add_common(sweep, sweep_common, true);
    sweep->add_flag("--quiet", quiet, "no progress output");

    std::string report_in, report_out;
    auto* report = app.add_subcommand("report", "summary tables from a results.csv");
    report->add_option("--in", report_in, "results.csv or the directory holding it (default: results)");
    report->add_option("--out", report_out, "directory for summary.csv, correlations.csv, report.txt");

    std::uint64_t validate_seed = 1;
    auto* validate = app.add_subcommand("validate", "run the built-in invariant checks");
    validate->add_option("--seed", validate_seed, "seed for the random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run) return cmd_run(run_common, rf);
        if (*sweep) return cmd_sweep(sweep_common, quiet);
        if (*report) return cmd_report(report_in, report_out);
        if (*validate) return cmd_validate(validate_seed);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidSpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}
