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

// Injection / evolution / readout loop with time multiplexing.
//
// Each injection step k: the input qubit is reset to |psi_{s_k}>, then the
// register evolves for V substeps of dt = dt_inject / V, and <Z_q> of every
// qubit is read after each substep. Row k of the readout therefore holds N*V
// values, column v*N + (q-1) being qubit q after substep v+1.

#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrc/entanglement.hpp"
#include "qrc/pauli_transfer.hpp"
#include "qrc/quantum_core.hpp"
#include "qrc/signal.hpp"

namespace qrc {

struct RunConfig {
    RegisterSpec reg;
    HamiltonianParams hamiltonian;
    double gamma = 0.0;
    JumpSet jumps = JumpSet::both;
    double dt_inject = 2.5;
    int v_nodes = 10;
    int washout = 100;
    bool record_states = false;
    bool record_negativity = false;
    BipartitionMode bipartitions = BipartitionMode::all;
    // Number of post-washout injection steps for which diagnostics are kept;
    // 0 keeps all of them.
    int diagnostic_steps = 0;

    [[nodiscard]] double substep() const { return dt_inject / v_nodes; }

    void validate() const {
        reg.validate();
        hamiltonian.validate();
        if (hamiltonian.couplings.n() != reg.n_qubits) throw InvalidSpecError("coupling matrix size does not match register");
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidSpecError("gamma must be finite and >= 0");
        if (!(dt_inject > 0.0) || !std::isfinite(dt_inject)) throw InvalidSpecError("injection period must be > 0");
        if (v_nodes < 1) throw InvalidSpecError("v_nodes must be >= 1");
        if (washout < 0) throw InvalidSpecError("washout must be >= 0");
        if (diagnostic_steps < 0) throw InvalidSpecError("diagnostic_steps must be >= 0");
    }
};

struct ReadoutMatrix {
    RMatrix rows;  // K x (N*V)
    std::size_t valid_from = 0;
    int n_qubits = 0;
    int v_nodes = 0;

    [[nodiscard]] Eigen::Index column(int qubit, int substep) const { return static_cast<Eigen::Index>(substep - 1) * n_qubits + (qubit - 1); }
};

struct TrajectoryDiagnostics {
    std::vector<NegativityRecord> negativity;
    std::vector<CMatrix> states;
    double sample_interval = 0.0;
};

struct RunResult {
    ReadoutMatrix readout;
    TrajectoryDiagnostics diagnostics;
};

/// Owns the propagator for one parameter point. Immutable after construction,
/// so one instance can serve many runs (and threads).
class Reservoir {
public:
    explicit Reservoir(RunConfig config) : config_(std::move(config)), basis_(config_.reg.n_qubits) {
        config_.validate();
        const CMatrix h = build_hamiltonian(config_.hamiltonian);
        const auto jumps = build_jump_operators(config_.reg.n_qubits, config_.jumps);
        const LindbladGenerator gen = build_liouvillian(h, jumps, config_.gamma);
        propagator_ = make_propagator(gen, config_.substep());
        transfer_ = make_pauli_transfer(propagator_, basis_);
    }

    [[nodiscard]] const RunConfig& config() const { return config_; }
    [[nodiscard]] const Propagator& propagator() const { return propagator_; }
    [[nodiscard]] const PauliTransfer& transfer() const { return transfer_; }
    [[nodiscard]] const PauliBasis& basis() const { return basis_; }

    [[nodiscard]] RunResult run(const InputSeries& input, const std::optional<DensityMatrix>& initial = std::nullopt) const {
        const InputSeries* in[] = {&input};
        const bool diag[] = {true};
        auto out = run_batch(in, diag, initial);
        return std::move(out.front());
    }

    /// Runs equal-length inputs in lockstep. `diagnose[b]` selects which members
    /// record states/negativity (when the config asks for them).
    [[nodiscard]] std::vector<RunResult> run_batch(std::span<const InputSeries* const> inputs, std::span<const bool> diagnose,
                                                   const std::optional<DensityMatrix>& initial = std::nullopt) const {
        const Eigen::Index batch = static_cast<Eigen::Index>(inputs.size());
        if (batch == 0) return {};
        if (diagnose.size() != inputs.size()) throw InvalidSpecError("diagnose flags must match inputs");
        const std::size_t steps = inputs.front()->size();
        for (const auto* in : inputs)
            if (in->size() != steps) throw InvalidSpecError("batched inputs must have equal length");
        if (steps == 0) throw InvalidSpecError("empty input series");
        if (static_cast<std::size_t>(config_.washout) >= steps)
            throw InvalidSpecError("washout " + std::to_string(config_.washout) + " not shorter than input length " + std::to_string(steps));

        const int n = config_.reg.n_qubits;
        const int v_nodes = config_.v_nodes;
        const int input_qubit = config_.reg.input_qubit;

        RVector start = RVector::Zero(basis_.size());
        if (initial) {
            if (initial->n_qubits() != n) throw InvalidSpecError("initial state does not match register");
            start = basis_.coefficients(initial->matrix());
        } else {
            start[0] = 1.0;  // maximally mixed
        }
        RMatrix states = start.replicate(1, batch);
        RMatrix next(states.rows(), batch);

        std::vector<RunResult> results(static_cast<std::size_t>(batch));
        for (auto& r : results) {
            r.readout.rows.resize(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(n) * v_nodes);
            r.readout.valid_from = static_cast<std::size_t>(config_.washout);
            r.readout.n_qubits = n;
            r.readout.v_nodes = v_nodes;
            r.diagnostics.sample_interval = config_.substep();
        }
        const bool any_diag = config_.record_states || config_.record_negativity;
        const std::size_t diag_end = config_.diagnostic_steps == 0
                                         ? steps
                                         : std::min(steps, static_cast<std::size_t>(config_.washout + config_.diagnostic_steps));
        const auto parts = bipartitions(n, config_.bipartitions);

        for (std::size_t k = 0; k < steps; ++k) {
            for (Eigen::Index b = 0; b < batch; ++b) inject_pauli(states, b, inputs[b]->values[k], basis_, input_qubit);
            const bool diag_now = any_diag && k >= static_cast<std::size_t>(config_.washout) && k < diag_end;
            for (int v = 0; v < v_nodes; ++v) {
                next.noalias() = transfer_.matrix * states;
                states.swap(next);
                for (Eigen::Index b = 0; b < batch; ++b) {
                    auto& rows = results[static_cast<std::size_t>(b)].readout.rows;
                    for (int q = 1; q <= n; ++q)
                        rows(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v) * n + (q - 1)) = states(basis_.z_index(q), b);
                    if (diag_now && diagnose[static_cast<std::size_t>(b)])
                        record(results[static_cast<std::size_t>(b)].diagnostics, states.col(b), parts,
                               static_cast<long>(k) * v_nodes + v + 1);
                }
            }
            for (Eigen::Index b = 0; b < batch; ++b) {
                const double drift = std::abs(states(0, b) - 1.0);
                if (!(drift <= 1e-6))
                    throw NumericError("trace drift " + std::to_string(drift) + " at injection step " + std::to_string(k));
            }
        }
        return results;
    }

private:
    void record(TrajectoryDiagnostics& diag, const RVector& coeffs, const std::vector<Bipartition>& parts, long time_index) const {
        CMatrix rho = basis_.density(coeffs);
        if (config_.record_negativity) {
            const DensityMatrix dm(rho);
            NegativityRecord rec;
            rec.time_index = time_index;
            double sum = 0.0;
            for (const auto& p : parts) {
                const double v = log_negativity(dm, p);
                rec.per_bipartition.emplace(p, v);
                sum += v;
            }
            rec.mean = sum / static_cast<double>(parts.size());
            diag.negativity.push_back(std::move(rec));
        }
        if (config_.record_states) diag.states.push_back(std::move(rho));
    }

    RunConfig config_;
    PauliBasis basis_;
    Propagator propagator_;
    PauliTransfer transfer_;
};

inline RunResult run_reservoir(const RunConfig& config, const InputSeries& input) {
    return Reservoir(config).run(input);
}

/// One row per (step, substep): step, substep, t, then <Z_q> for each qubit.
inline void write_readout_csv(const ReadoutMatrix& r, double dt_inject, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path);
    os.precision(12);
    os << "step,substep,t";
    for (int q = 1; q <= r.n_qubits; ++q) os << ",z" << q;
    os << ",valid\n";
    const double dt = dt_inject / r.v_nodes;
    for (Eigen::Index k = 0; k < r.rows.rows(); ++k)
        for (int v = 1; v <= r.v_nodes; ++v) {
            os << k << ',' << v << ',' << static_cast<double>(k) * dt_inject + v * dt;
            for (int q = 1; q <= r.n_qubits; ++q) os << ',' << r.rows(k, r.column(q, v));
            os << ',' << (static_cast<std::size_t>(k) >= r.valid_from ? 1 : 0) << '\n';
        }
}

inline void write_negativity_csv(const std::vector<NegativityRecord>& records, double sample_interval, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path);
    os.precision(12);
    os << "time_index,t,mean";
    if (!records.empty())
        for (const auto& [part, v] : records.front().per_bipartition) os << ",EN_" << part.label();
    os << '\n';
    for (const auto& rec : records) {
        os << rec.time_index << ',' << static_cast<double>(rec.time_index) * sample_interval << ',' << rec.mean;
        for (const auto& [part, v] : rec.per_bipartition) os << ',' << v;
        os << '\n';
    }
}

}  // namespace qrc
