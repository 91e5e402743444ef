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

// Linear readout training and memory capacity.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrc/reservoir.hpp"
#include "qrc/signal.hpp"

namespace qrc {

/// Affine readout y = x . w[0..F) + w[F].
struct RidgeModel {
    RVector weights;
    double lambda = 0.0;

    [[nodiscard]] Eigen::Index features() const { return weights.size() - 1; }
    [[nodiscard]] double bias() const { return weights[weights.size() - 1]; }

    [[nodiscard]] RVector predict(const RMatrix& x) const {
        if (x.cols() != features()) throw InvalidSpecError("feature count does not match model");
        return (x * weights.head(features())).array() + bias();
    }
};

/// Ridge regression with an unpenalized bias on a fixed design matrix.
///
/// Columns are centred (which is exactly what leaving the bias unpenalized
/// amounts to) and factored once by SVD, Xc = U S V^T; each (y, lambda) is then
/// w = V diag(s / (s^2 + lambda)) U^T (y - mean y).
class RidgeSolver {
public:
    explicit RidgeSolver(const RMatrix& x) {
        if (x.rows() < 1 || x.cols() < 1) throw InvalidSpecError("empty design matrix");
        if (!x.allFinite()) throw NumericError("design matrix has non-finite entries");
        if (x.rows() < x.cols() + 1)
            warn("ridge design has " + std::to_string(x.rows()) + " rows for " + std::to_string(x.cols()) + " features");
        mean_ = x.colwise().mean();
        const RMatrix centred = x.rowwise() - mean_.transpose();
        Eigen::JacobiSVD<RMatrix> svd(centred, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u_ = svd.matrixU();
        v_ = svd.matrixV();
        s_ = svd.singularValues();
        rows_ = x.rows();
    }

    [[nodiscard]] Eigen::Index rows() const { return rows_; }
    [[nodiscard]] Eigen::Index features() const { return mean_.size(); }

    [[nodiscard]] RidgeModel fit(const RVector& y, double lambda) const {
        if (y.size() != rows_) throw InvalidSpecError("target length does not match design rows");
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
        const double y_mean = y.mean();
        const RVector proj = u_.transpose() * (y.array() - y_mean).matrix();
        RVector gain(s_.size());
        const double smax = s_.size() ? s_.maxCoeff() : 0.0;
        for (Eigen::Index i = 0; i < s_.size(); ++i) {
            const double s = s_[i];
            if (lambda == 0.0) {
                if (!(s > smax * 1e-12) || s == 0.0)
                    throw IllConditionedError("design matrix is singular at lambda = 0; use lambda > 0");
                gain[i] = 1.0 / s;
            } else {
                gain[i] = s / (s * s + lambda);
            }
        }
        RidgeModel m;
        m.lambda = lambda;
        m.weights.resize(features() + 1);
        m.weights.head(features()) = v_ * (gain.asDiagonal() * proj);
        m.weights[features()] = y_mean - mean_.dot(m.weights.head(features()));
        if (!m.weights.allFinite()) throw NumericError("ridge weights are not finite");
        return m;
    }

private:
    RVector mean_;
    RMatrix u_, v_;
    RVector s_;
    Eigen::Index rows_ = 0;
};

/// Rows usable for training: after the readout washout and the target's
/// undefined prefix.
inline std::size_t first_trainable_row(const ReadoutMatrix& x, const TargetSeries& y) {
    if (static_cast<std::size_t>(x.rows.rows()) != y.size()) throw InvalidSpecError("readout and target lengths differ");
    return std::max(x.valid_from, y.valid_from);
}

inline RidgeModel ridge_fit(const ReadoutMatrix& x, const TargetSeries& y, double lambda) {
    const std::size_t from = first_trainable_row(x, y);
    const Eigen::Index n = x.rows.rows() - static_cast<Eigen::Index>(from);
    if (n < 2) throw InvalidSpecError("fewer than two trainable rows");
    const RVector target = Eigen::Map<const RVector>(y.values.data() + from, n);
    return RidgeSolver(x.rows.bottomRows(n)).fit(target, lambda);
}

/// Squared Pearson correlation cov^2(y, t) / (var y var t). A series with zero
/// variance gives 0 and a warning.
inline double memory_capacity(std::span<const double> prediction, std::span<const double> target) {
    if (prediction.size() != target.size()) throw InvalidSpecError("capacity series lengths differ");
    if (prediction.size() < 2) throw InvalidSpecError("capacity needs at least two samples");
    const auto n = static_cast<double>(prediction.size());
    double mp = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        mp += prediction[i];
        mt += target[i];
    }
    mp /= n;
    mt /= n;
    double spp = 0.0, stt = 0.0, spt = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double dp = prediction[i] - mp;
        const double dt = target[i] - mt;
        spp += dp * dp;
        stt += dt * dt;
        spt += dp * dt;
    }
    const double floor_p = 1e-24 * n * (1.0 + mp * mp);
    const double floor_t = 1e-24 * n * (1.0 + mt * mt);
    if (!(spp > floor_p) || !(stt > floor_t)) {
        warn("zero-variance series in memory capacity; reporting 0");
        return 0.0;
    }
    return std::clamp(spt * spt / (spp * stt), 0.0, 1.0);
}

inline double memory_capacity(const RVector& prediction, const RVector& target) {
    return memory_capacity(std::span<const double>(prediction.data(), static_cast<std::size_t>(prediction.size())),
                           std::span<const double>(target.data(), static_cast<std::size_t>(target.size())));
}

/// Logarithmic grid of `points` values over [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int points) {
    if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw InvalidSpecError("invalid log grid");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = points == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
    return g;
}

inline std::vector<double> default_lambda_grid() { return log_grid(1e-9, 1e-1, 17); }

struct LambdaSelection {
    RidgeModel model;       // refit on every training row with the chosen lambda
    double lambda = 0.0;
    double validation_capacity = 0.0;
};

namespace detail {

// Relative margin under which two validation capacities count as tied.
inline constexpr double kCapacityTie = 1e-12;

// Picks the lambda with the best validation capacity; ties keep the smaller
// lambda. Solvers are passed in so callers can reuse one factorization across
// several targets.
inline LambdaSelection select_with(const RidgeSolver& fit_solver, const RMatrix& x_val, const RVector& y_fit,
                                   const RVector& y_val, const RidgeSolver& full_solver, const RVector& y_full,
                                   std::vector<double> grid) {
    if (grid.empty()) throw InvalidSpecError("lambda grid is empty");
    std::sort(grid.begin(), grid.end());
    double best = -1.0;
    double best_lambda = grid.front();
    for (double lambda : grid) {
        double cap = 0.0;
        try {
            cap = memory_capacity(fit_solver.fit(y_fit, lambda).predict(x_val), y_val);
        } catch (const IllConditionedError&) {
            continue;
        }
        if (cap > best + kCapacityTie * std::max(1.0, std::abs(best))) {
            best = cap;
            best_lambda = lambda;
        }
    }
    if (best < 0.0) throw IllConditionedError("no lambda in the grid gives a solvable system");
    return {full_solver.fit(y_full, best_lambda), best_lambda, best};
}

inline Eigen::Index split_point(Eigen::Index rows, double validation_fraction) {
    const auto fit_rows = static_cast<Eigen::Index>(std::floor(static_cast<double>(rows) * (1.0 - validation_fraction)));
    return std::clamp<Eigen::Index>(fit_rows, 2, rows - 2);
}

}  // namespace detail

/// Fits on the leading (1 - validation_fraction) of the rows, scores capacity on
/// the rest, and returns the lambda with the highest validation capacity
/// (smaller lambda on ties) with a model refit on all rows.
inline LambdaSelection select_lambda(const RMatrix& x, const RVector& y, const std::vector<double>& grid,
                                     double validation_fraction = 0.25) {
    if (x.rows() != y.size()) throw InvalidSpecError("design rows and target length differ");
    if (x.rows() < 4) throw InvalidSpecError("too few rows to split for validation");
    const Eigen::Index split = detail::split_point(x.rows(), validation_fraction);
    const RMatrix x_fit = x.topRows(split);
    const RMatrix x_val = x.bottomRows(x.rows() - split);
    const RidgeSolver fit_solver(x_fit);
    const RidgeSolver full_solver(x);
    return detail::select_with(fit_solver, x_val, y.head(split), y.tail(x.rows() - split), full_solver, y, grid);
}

// ---------------------------------------------------------------------------
// Capacity protocol

struct CapacityProtocol {
    int tau_max = 20;
    double stop_threshold = 0.01;  // stop after `stop_run` consecutive capacities below this
    int stop_run = 3;
    std::vector<double> lambda_grid = default_lambda_grid();
    double validation_fraction = 0.25;
    int n_train = 4;
    int train_steps = 2000;  // post-washout injections per sequence
    int test_steps = 2000;

    void validate() const {
        if (tau_max < 0) throw InvalidSpecError("tau_max must be >= 0");
        if (stop_run < 1) throw InvalidSpecError("stop_run must be >= 1");
        if (lambda_grid.empty()) throw InvalidSpecError("lambda grid is empty");
        if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) throw InvalidSpecError("validation fraction must be in (0, 1)");
        if (n_train < 1 || train_steps < 4 || test_steps < 4) throw InvalidSpecError("training protocol too small");
    }
};

struct CapacityReport {
    std::map<int, double> per_tau;  // tau (delay) or n (NARMA) -> capacity
    std::map<int, double> lambda;   // selected lambda per entry
    double total = 0.0;
    int tau_max = 0;                // largest order evaluated
    bool stopped_early = false;
    TaskKind task = TaskKind::delay;
};

/// Reservoir readouts and the inputs that produced them.
struct Dataset {
    std::vector<ReadoutMatrix> train_x;
    std::vector<InputSeries> train_s;
    ReadoutMatrix test_x;
    InputSeries test_s;
    TrajectoryDiagnostics test_diagnostics;
};

/// Smallest order of a task family: delay starts at tau = 0, NARMA at n = 1.
inline int first_order(TaskKind task) { return task == TaskKind::delay ? 0 : 1; }

/// Fits an independent readout per order and sums the test capacities.
/// Delay orders run 0..tau_max; NARMA orders run 1..tau_max.
inline CapacityReport evaluate_capacity(const Dataset& data, TaskKind task, const CapacityProtocol& protocol) {
    protocol.validate();
    if (data.train_x.empty() || data.train_x.size() != data.train_s.size()) throw InvalidSpecError("dataset needs training sequences");

    // Washout covers the longest undefined target prefix in the default protocol;
    // take the maximum anyway so every order trains on identical rows.
    const std::size_t target_prefix = static_cast<std::size_t>(protocol.tau_max) + 1;
    auto row_start = [&](const ReadoutMatrix& x) { return std::max(x.valid_from, task == TaskKind::delay ? target_prefix - 1 : target_prefix); };

    Eigen::Index total_rows = 0;
    for (const auto& x : data.train_x) total_rows += x.rows.rows() - static_cast<Eigen::Index>(row_start(x));
    const Eigen::Index features = data.train_x.front().rows.cols();
    RMatrix x_train(total_rows, features);
    {
        Eigen::Index at = 0;
        for (const auto& x : data.train_x) {
            const Eigen::Index n = x.rows.rows() - static_cast<Eigen::Index>(row_start(x));
            if (n < 1) throw InvalidSpecError("training sequence shorter than washout");
            x_train.middleRows(at, n) = x.rows.bottomRows(n);
            at += n;
        }
    }
    const std::size_t test_from = row_start(data.test_x);
    const Eigen::Index test_rows = data.test_x.rows.rows() - static_cast<Eigen::Index>(test_from);
    if (test_rows < 2) throw InvalidSpecError("test sequence shorter than washout");
    const RMatrix x_test = data.test_x.rows.bottomRows(test_rows);

    const Eigen::Index split = detail::split_point(total_rows, protocol.validation_fraction);
    const RMatrix x_fit = x_train.topRows(split);
    const RMatrix x_val = x_train.bottomRows(total_rows - split);
    const RidgeSolver fit_solver(x_fit);
    const RidgeSolver full_solver(x_train);

    CapacityReport report;
    report.task = task;
    int below = 0;
    for (int order = first_order(task); order <= protocol.tau_max; ++order) {
        RVector y_train(total_rows);
        Eigen::Index at = 0;
        for (std::size_t i = 0; i < data.train_x.size(); ++i) {
            const TargetSeries t = make_target(data.train_s[i], task, order);
            const std::size_t from = row_start(data.train_x[i]);
            for (std::size_t k = from; k < t.size(); ++k) y_train[at++] = t.values[k];
        }
        const TargetSeries t_test = make_target(data.test_s, task, order);
        const RVector y_test = Eigen::Map<const RVector>(t_test.values.data() + test_from, test_rows);

        const auto sel = detail::select_with(fit_solver, x_val, y_train.head(split), y_train.tail(total_rows - split), full_solver,
                                             y_train, protocol.lambda_grid);
        const double cap = memory_capacity(sel.model.predict(x_test), y_test);
        report.per_tau[order] = cap;
        report.lambda[order] = sel.lambda;
        report.total += cap;
        report.tau_max = order;
        below = cap < protocol.stop_threshold ? below + 1 : 0;
        if (below >= protocol.stop_run && order < protocol.tau_max) {
            report.stopped_early = true;
            break;
        }
    }
    return report;
}

/// Seeds of the training and test sequences derived from one input spec.
inline std::uint64_t training_seed(std::uint64_t base, int index) { return hash_combine(hash_combine(base, std::string_view("train")), static_cast<std::uint64_t>(index)); }
inline std::uint64_t test_seed(std::uint64_t base) { return hash_combine(base, std::string_view("test")); }

/// Generates training/test inputs for each spec (same frequency, fresh seeds),
/// runs all of them through `reservoir` in one lockstep batch and collects the
/// readouts. Test runs carry the diagnostics the reservoir config asks for.
inline std::vector<Dataset> build_datasets(const Reservoir& reservoir, std::span<const InputSpec> specs, const CapacityProtocol& protocol) {
    protocol.validate();
    if (protocol.train_steps != protocol.test_steps) throw InvalidSpecError("batched datasets need train_steps == test_steps");
    const int washout = reservoir.config().washout;
    const std::size_t per_spec = static_cast<std::size_t>(protocol.n_train) + 1;

    std::vector<InputSeries> inputs;
    inputs.reserve(specs.size() * per_spec);
    for (const auto& spec : specs) {
        for (int i = 0; i < protocol.n_train; ++i) {
            InputSpec s = spec;
            s.k_steps = washout + protocol.train_steps;
            s.seed = training_seed(spec.seed, i);
            inputs.push_back(gen_input(s));
        }
        InputSpec s = spec;
        s.k_steps = washout + protocol.test_steps;
        s.seed = test_seed(spec.seed);
        inputs.push_back(gen_input(s));
    }
    std::vector<const InputSeries*> ptrs;
    for (const auto& s : inputs) ptrs.push_back(&s);
    const auto diagnose = std::make_unique<bool[]>(ptrs.size());
    for (std::size_t i = 0; i < ptrs.size(); ++i) diagnose[i] = (i % per_spec) == per_spec - 1;

    auto results = reservoir.run_batch(ptrs, std::span<const bool>(diagnose.get(), ptrs.size()));

    std::vector<Dataset> out(specs.size());
    for (std::size_t d = 0; d < specs.size(); ++d) {
        for (std::size_t i = 0; i + 1 < per_spec; ++i) {
            out[d].train_x.push_back(std::move(results[d * per_spec + i].readout));
            out[d].train_s.push_back(std::move(inputs[d * per_spec + i]));
        }
        auto& test = results[d * per_spec + per_spec - 1];
        out[d].test_x = std::move(test.readout);
        out[d].test_diagnostics = std::move(test.diagnostics);
        out[d].test_s = std::move(inputs[d * per_spec + per_spec - 1]);
    }
    return out;
}

inline Dataset build_dataset(const Reservoir& reservoir, const InputSpec& input, const CapacityProtocol& protocol) {
    return std::move(build_datasets(reservoir, std::span<const InputSpec>(&input, 1), protocol).front());
}

/// Capacity of one reservoir configuration on one task family.
inline CapacityReport total_capacity(const RunConfig& config, const InputSpec& input, TaskKind task, const CapacityProtocol& protocol = {}) {
    const Reservoir reservoir(config);
    return evaluate_capacity(build_dataset(reservoir, input, protocol), task, protocol);
}

}  // namespace qrc
