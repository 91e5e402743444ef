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

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrc/quantum_core.hpp"

namespace qrc {

/// One side of a bipartition of the register. Stored in canonical form so that
/// A and its complement compare equal: the smaller side, and on a tie the side
/// that contains qubit 1.
class Bipartition {
public:
    Bipartition(std::vector<int> side_a, int n_qubits) : n_(n_qubits) {
        std::sort(side_a.begin(), side_a.end());
        side_a.erase(std::unique(side_a.begin(), side_a.end()), side_a.end());
        for (int q : side_a) check_qubit(q, n_);
        if (side_a.empty() || static_cast<int>(side_a.size()) == n_)
            throw InvalidSpecError("bipartition sides must both be non-empty");
        auto complement = complement_of(side_a);
        const bool take_complement = complement.size() < side_a.size() ||
                                     (complement.size() == side_a.size() && complement.front() == 1);
        side_ = take_complement ? std::move(complement) : std::move(side_a);
    }

    [[nodiscard]] const std::vector<int>& side_a() const { return side_; }
    [[nodiscard]] std::vector<int> side_b() const { return complement_of(side_); }
    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] bool contains(int q) const { return std::binary_search(side_.begin(), side_.end(), q); }

    /// "1|234" style label.
    [[nodiscard]] std::string label() const {
        std::string s;
        for (int q : side_) s += std::to_string(q);
        s += '|';
        for (int q : side_b()) s += std::to_string(q);
        return s;
    }

    friend bool operator==(const Bipartition& a, const Bipartition& b) { return a.n_ == b.n_ && a.side_ == b.side_; }
    friend bool operator<(const Bipartition& a, const Bipartition& b) {
        if (a.side_.size() != b.side_.size()) return a.side_.size() < b.side_.size();
        return a.side_ < b.side_;
    }

private:
    [[nodiscard]] std::vector<int> complement_of(const std::vector<int>& s) const {
        std::vector<int> c;
        for (int q = 1; q <= n_; ++q)
            if (!std::binary_search(s.begin(), s.end(), q)) c.push_back(q);
        return c;
    }

    std::vector<int> side_;
    int n_;
};

enum class BipartitionMode { all, single_qubit };

inline std::string_view to_string(BipartitionMode m) { return m == BipartitionMode::all ? "all" : "single-qubit"; }

inline BipartitionMode parse_bipartition_mode(std::string_view s) {
    if (s == "all") return BipartitionMode::all;
    if (s == "single-qubit" || s == "single") return BipartitionMode::single_qubit;
    throw InvalidSpecError("unknown bipartition mode '" + std::string(s) + "' (expected all|single-qubit)");
}

/// Every distinct unordered bipartition; 2^(n-1) - 1 of them.
inline std::vector<Bipartition> all_bipartitions(int n) {
    std::vector<Bipartition> parts;
    // Subsets that exclude qubit n enumerate each unordered pair exactly once.
    const unsigned limit = 1u << (n - 1);
    for (unsigned mask = 1; mask < limit; ++mask) {
        std::vector<int> side;
        for (int q = 1; q < n; ++q)
            if (mask & (1u << (q - 1))) side.push_back(q);
        parts.emplace_back(std::move(side), n);
    }
    std::sort(parts.begin(), parts.end());
    return parts;
}

inline std::vector<Bipartition> single_qubit_bipartitions(int n) {
    std::vector<Bipartition> parts;
    for (int q = 1; q <= n; ++q) parts.emplace_back(std::vector<int>{q}, n);
    return parts;
}

inline std::vector<Bipartition> bipartitions(int n, BipartitionMode mode) {
    return mode == BipartitionMode::all ? all_bipartitions(n) : single_qubit_bipartitions(n);
}

/// Transposes the subsystem-A indices of a 2^n x 2^n matrix.
inline CMatrix partial_transpose(const CMatrix& m, const Bipartition& part) {
    const int n = part.n_qubits();
    if (m.rows() != m.cols() || m.rows() != (Eigen::Index{1} << n))
        throw InvalidSpecError("matrix does not match the bipartition register");
    Eigen::Index mask = 0;
    for (int q : part.side_a()) mask |= Eigen::Index{1} << qubit_bit(q, n);
    const Eigen::Index d = m.rows();
    CMatrix out(d, d);
    // <i_A i_B| rho^T_A |j_A j_B> = <j_A i_B| rho |i_A j_B>
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) {
            const Eigen::Index swap = (i ^ j) & mask;
            out(i, j) = m(i ^ swap, j ^ swap);
        }
    return out;
}

inline CMatrix partial_transpose(const DensityMatrix& rho, const Bipartition& part) {
    return partial_transpose(rho.matrix(), part);
}

/// log2 of the trace norm of rho^{T_A}. The partial transpose is Hermitian, so the
/// trace norm is the sum of absolute eigenvalues. Values in [-1e-10, 0) are
/// clamped to 0.
inline double log_negativity(const DensityMatrix& rho, const Bipartition& part) {
    const CMatrix pt = partial_transpose(rho, part);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(pt, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on partial transpose");
    const double value = std::log2(es.eigenvalues().cwiseAbs().sum());
    if (value < 0.0 && value >= -1e-10) return 0.0;
    return value;
}

struct NegativityRecord {
    std::map<Bipartition, double> per_bipartition;
    double mean = 0.0;
    long time_index = 0;

    /// Mean restricted to bipartitions that isolate a single qubit.
    [[nodiscard]] double single_qubit_mean() const {
        double sum = 0.0;
        int count = 0;
        for (const auto& [part, v] : per_bipartition)
            if (part.side_a().size() == 1) {
                sum += v;
                ++count;
            }
        return count ? sum / count : 0.0;
    }

    /// Value for the bipartition isolating qubit q; throws if it was not computed.
    [[nodiscard]] double isolating(int q) const {
        for (const auto& [part, v] : per_bipartition)
            if (part.side_a().size() == 1 && part.side_a().front() == q) return v;
        throw InvalidSpecError("record has no bipartition isolating qubit " + std::to_string(q));
    }
};

inline NegativityRecord mean_log_negativity(const DensityMatrix& rho, BipartitionMode mode = BipartitionMode::all, long time_index = 0) {
    NegativityRecord rec;
    rec.time_index = time_index;
    double sum = 0.0;
    for (const auto& part : bipartitions(rho.n_qubits(), mode)) {
        const double v = log_negativity(rho, part);
        rec.per_bipartition.emplace(part, v);
        sum += v;
    }
    rec.mean = sum / static_cast<double>(rec.per_bipartition.size());
    return rec;
}

/// Mean of record means over indices >= washout.
inline double trajectory_mean_negativity(std::span<const NegativityRecord> records, std::size_t washout) {
    if (records.size() <= washout)
        throw DomainError("negativity trajectory of length " + std::to_string(records.size()) +
                          " is not longer than the washout " + std::to_string(washout));
    double sum = 0.0;
    for (std::size_t i = washout; i < records.size(); ++i) sum += records[i].mean;
    return sum / static_cast<double>(records.size() - washout);
}

}  // namespace qrc
