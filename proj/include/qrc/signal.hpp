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

// Input series and task targets.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qrc/common.hpp"

namespace qrc {

inline constexpr double kInfiniteFrequency = std::numeric_limits<double>::infinity();

enum class PhaseMode { per_component, shared };

struct InputSpec {
    double frequency = 1.0;  // f; kInfiniteFrequency selects i.i.d. random floats
    int n_components = 20;
    int k_steps = 1000;
    double dt_inject = 2.5;
    std::uint64_t seed = 0;
    PhaseMode phase = PhaseMode::per_component;

    [[nodiscard]] bool is_random() const { return std::isinf(frequency); }

    void validate() const {
        if (k_steps <= 0) throw InvalidSpecError("input needs k_steps > 0");
        if (is_random()) return;
        if (!(frequency > 0.0) || !std::isfinite(frequency)) throw InvalidSpecError("input frequency must be > 0");
        if (n_components < 1) throw InvalidSpecError("input needs at least one frequency component");
        if (!(dt_inject > 0.0) || !std::isfinite(dt_inject)) throw InvalidSpecError("injection period must be > 0");
    }
};

struct InputSeries {
    std::vector<double> values;
    InputSpec spec;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }
};

/// Component frequencies: n values equally spaced over [f/5000, f/50] inclusive.
inline std::vector<double> component_frequencies(double f, int n) {
    std::vector<double> fi(static_cast<std::size_t>(n));
    const double lo = f / 5000.0;
    const double hi = f / 50.0;
    for (int i = 0; i < n; ++i) fi[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return fi;
}

/// Min-max rescaling onto [0, 1]. A constant window maps to all zeros.
inline void rescale_unit_interval(std::vector<double>& v) {
    if (v.empty()) return;
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    for (double& x : v) x = span > 0.0 ? (x - lo) / span : 0.0;
    // pin the extremes exactly
    if (span > 0.0) {
        *std::min_element(v.begin(), v.end()) = 0.0;
        *std::max_element(v.begin(), v.end()) = 1.0;
    }
}

inline InputSeries gen_random_input(int k_steps, std::uint64_t seed) {
    if (k_steps <= 0) throw InvalidSpecError("input needs k_steps > 0");
    std::mt19937_64 engine(seed);
    InputSeries out;
    out.spec.frequency = kInfiniteFrequency;
    out.spec.k_steps = k_steps;
    out.spec.seed = seed;
    out.values.resize(static_cast<std::size_t>(k_steps));
    for (double& x : out.values) x = uniform01(engine);
    return out;
}

/// Unrescaled s_k = sum_i sin(2 pi f_i t_k + 2 pi zeta_i), t_k = k dt.
inline std::vector<double> raw_input(const InputSpec& spec) {
    spec.validate();
    std::mt19937_64 engine(spec.seed);
    const auto fi = component_frequencies(spec.frequency, spec.n_components);
    std::vector<double> zeta(fi.size());
    const double shared = uniform01(engine);
    for (double& z : zeta) z = spec.phase == PhaseMode::shared ? shared : uniform01(engine);

    std::vector<double> s(static_cast<std::size_t>(spec.k_steps), 0.0);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double t = static_cast<double>(k) * spec.dt_inject;
        double acc = 0.0;
        for (std::size_t i = 0; i < fi.size(); ++i) acc += std::sin(two_pi * fi[i] * t + two_pi * zeta[i]);
        s[k] = acc;
    }
    return s;
}

inline InputSeries gen_input(const InputSpec& spec) {
    if (spec.is_random()) {
        InputSeries r = gen_random_input(spec.k_steps, spec.seed);
        r.spec = spec;
        return r;
    }
    InputSeries out{raw_input(spec), spec};
    rescale_unit_interval(out.values);
    return out;
}

/// Writes k, t_k, s_k.
inline void write_input_csv(const InputSeries& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path);
    os.precision(17);
    os << "k,t_k,s_k\n";
    const double dt = s.spec.dt_inject;
    for (std::size_t k = 0; k < s.size(); ++k) os << k << ',' << static_cast<double>(k) * dt << ',' << s.values[k] << '\n';
}

// ---------------------------------------------------------------------------
// Targets

enum class TaskKind { delay, narma };

inline std::string_view to_string(TaskKind t) { return t == TaskKind::delay ? "delay" : "narma"; }

inline TaskKind parse_task_kind(std::string_view s) {
    if (s == "delay") return TaskKind::delay;
    if (s == "narma") return TaskKind::narma;
    throw InvalidSpecError("unknown task '" + std::string(s) + "' (expected delay|narma)");
}

struct NarmaConstants {
    double alpha = 0.3;
    double beta = 0.002;
    double gamma = 1.5;
    double delta = 0.1;
};

struct TargetSeries {
    std::vector<double> values;  // entries before valid_from are placeholders (0)
    std::size_t valid_from = 0;
    TaskKind task = TaskKind::delay;
    int order = 0;  // tau for delay, n for NARMA
    NarmaConstants constants;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] bool valid(std::size_t k) const { return k >= valid_from && k < values.size(); }
};

/// y_k = s_{k-tau}; the first tau entries are invalid.
inline TargetSeries target_delay(const InputSeries& s, int tau) {
    if (tau < 0 || static_cast<std::size_t>(tau) >= s.size())
        throw DomainError("delay " + std::to_string(tau) + " outside [0, length)");
    TargetSeries t;
    t.task = TaskKind::delay;
    t.order = tau;
    t.valid_from = static_cast<std::size_t>(tau);
    t.values.assign(s.size(), 0.0);
    for (std::size_t k = t.valid_from; k < s.size(); ++k) t.values[k] = s.values[k - t.valid_from];
    return t;
}

/// One NARMA update: y_{k+1} from y_k, y_{k-1..k-n} and s_{k-n}, s_{k-1}.
inline double narma_step(const std::vector<double>& y, const std::vector<double>& s, std::size_t k, int n, const NarmaConstants& c) {
    double window = 0.0;
    for (int j = 1; j <= n; ++j) window += y[k - static_cast<std::size_t>(j)];
    return c.alpha * y[k] + c.beta * y[k] * window + c.gamma * s[k - static_cast<std::size_t>(n)] * s[k - 1] + c.delta;
}

/// y_{k+1} = alpha y_k + beta y_k sum_{j=1..n} y_{k-j} + gamma s_{k-n} s_{k-1} + delta,
/// with y_k = 0 for k <= n. Entries 0..n are invalid for training.
inline TargetSeries target_narma(const InputSeries& s, int n, const NarmaConstants& c = {}) {
    if (n < 1) throw DomainError("NARMA order must be >= 1");
    if (s.size() <= static_cast<std::size_t>(n) + 1) throw DomainError("input too short for NARMA order " + std::to_string(n));
    TargetSeries t;
    t.task = TaskKind::narma;
    t.order = n;
    t.constants = c;
    t.valid_from = static_cast<std::size_t>(n) + 1;
    t.values.assign(s.size(), 0.0);
    for (std::size_t k = static_cast<std::size_t>(n); k + 1 < s.size(); ++k) {
        const double next = narma_step(t.values, s.values, k, n, c);
        if (!std::isfinite(next) || std::abs(next) > 1e3)
            throw ConvergenceError("NARMA-" + std::to_string(n) + " diverged at step " + std::to_string(k + 1));
        t.values[k + 1] = next;
    }
    return t;
}

inline TargetSeries make_target(const InputSeries& s, TaskKind task, int order) {
    return task == TaskKind::delay ? target_delay(s, order) : target_narma(s, order);
}

/// Stationary points per sample: sign changes of the first difference.
inline double stationary_point_rate(const std::vector<double>& s) {
    if (s.size() < 3) return 0.0;
    std::size_t changes = 0;
    double prev = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        const double diff = s[k] - s[k - 1];
        if (diff == 0.0) continue;
        if (prev != 0.0 && (diff > 0.0) != (prev > 0.0)) ++changes;
        prev = diff;
    }
    return static_cast<double>(changes) / static_cast<double>(s.size() - 2);
}

}  // namespace qrc
