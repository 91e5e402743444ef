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

// Disordered transverse-field Ising register with Lindblad dissipation.
//
// Conventions used throughout the library:
//   * qubits are numbered 1..N; qubit 1 is the most significant bit of a
//     computational-basis index, so |q1 q2 ... qN> has index sum_q b_q 2^(N-q)
//     and kron(A1, ..., AN) acts as A_q on qubit q;
//   * sigma_z |0> = +|0>, sigma_z |1> = -|1>;
//   * density matrices are vectorized by stacking columns (Eigen's native
//     column-major order), so vec(A X B) = (B^T kron A) vec(X).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qrc/common.hpp"

namespace qrc {

struct RegisterSpec {
    int n_qubits = 4;
    int input_qubit = 1;

    void validate() const {
        if (n_qubits < 2)
            throw InvalidSpecError("register needs at least 2 qubits, got " + std::to_string(n_qubits));
        if (n_qubits > 12) throw InvalidSpecError("register too large for dense simulation");
        if (input_qubit < 1 || input_qubit > n_qubits)
            throw InvalidSpecError("input qubit " + std::to_string(input_qubit) + " outside register");
    }
    [[nodiscard]] Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }
};

/// Bit position of 1-based qubit `q` inside a basis index of an n-qubit register.
inline constexpr int qubit_bit(int q, int n) { return n - q; }

inline void check_qubit(int q, int n) {
    if (q < 1 || q > n) throw InvalidSpecError("qubit index " + std::to_string(q) + " out of range 1.." + std::to_string(n));
}

inline int qubits_for_dim(Eigen::Index dim) {
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw InvalidSpecError("dimension " + std::to_string(dim) + " is not a power of two");
    return std::countr_zero(static_cast<std::uint64_t>(dim));
}

// ---------------------------------------------------------------------------
// Couplings and Hamiltonian

struct CouplingMatrix {
    RMatrix j;           // symmetric, zero diagonal
    double scale = 0.0;  // J_s; off-diagonal entries lie in [-scale/2, scale/2]

    [[nodiscard]] int n() const { return static_cast<int>(j.rows()); }
};

/// Draws J_ij (i > j) i.i.d. uniform on [-j_s/2, j_s/2]. Entries are consumed in
/// row-major order of the strict lower triangle.
inline CouplingMatrix sample_couplings(double j_s, std::uint64_t seed, int n) {
    if (n <= 0) throw InvalidSpecError("coupling matrix needs a positive qubit count");
    if (!(j_s >= 0.0) || !std::isfinite(j_s)) throw DomainError("coupling scale must be finite and >= 0");
    std::mt19937_64 engine(seed);
    CouplingMatrix c{RMatrix::Zero(n, n), j_s};
    for (int i = 1; i < n; ++i)
        for (int k = 0; k < i; ++k) {
            const double v = uniform(engine, -0.5 * j_s, 0.5 * j_s);
            c.j(i, k) = v;
            c.j(k, i) = v;
        }
    return c;
}

struct HamiltonianParams {
    CouplingMatrix couplings;
    double field = 2.0;  // transverse field h

    void validate() const {
        const auto& j = couplings.j;
        if (j.rows() != j.cols()) throw InvalidSpecError("coupling matrix not square");
        if (!j.allFinite() || !std::isfinite(field)) throw InvalidSpecError("non-finite Hamiltonian parameters");
        for (Eigen::Index a = 0; a < j.rows(); ++a) {
            if (j(a, a) != 0.0) throw InvalidSpecError("coupling matrix has a non-zero diagonal");
            for (Eigen::Index b = 0; b < a; ++b)
                if (j(a, b) != j(b, a)) throw InvalidSpecError("coupling matrix not symmetric");
        }
    }
};

namespace pauli {
inline CMatrix identity() { return CMatrix::Identity(2, 2); }
inline CMatrix x() { CMatrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline CMatrix y() { CMatrix m(2, 2); m << 0, -kI, kI, 0; return m; }
inline CMatrix z() { CMatrix m(2, 2); m << 1, 0, 0, -1; return m; }
/// sigma^+ = (X + iY)/2 = |0><1|
inline CMatrix raising() { CMatrix m(2, 2); m << 0, 1, 0, 0; return m; }
/// sigma^- = (X - iY)/2 = |1><0|
inline CMatrix lowering() { CMatrix m(2, 2); m << 0, 0, 1, 0; return m; }
}  // namespace pauli

/// Embeds a single-qubit operator at qubit q (identity elsewhere).
inline CMatrix embed(const CMatrix& op, int q, int n) {
    check_qubit(q, n);
    const Eigen::Index left = Eigen::Index{1} << (q - 1);
    const Eigen::Index right = Eigen::Index{1} << (n - q);
    CMatrix out = Eigen::kroneckerProduct(CMatrix::Identity(left, left), op).eval();
    return Eigen::kroneckerProduct(out, CMatrix::Identity(right, right)).eval();
}

/// H = sum_{i>j} J_ij X_i X_j + h sum_i Z_i. Real symmetric in the computational basis.
inline CMatrix build_hamiltonian(const HamiltonianParams& params) {
    params.validate();
    const int n = params.couplings.n();
    if (n < 1) throw InvalidSpecError("empty register");
    const Eigen::Index dim = Eigen::Index{1} << n;
    CMatrix h = CMatrix::Zero(dim, dim);
    // X_i X_j flips bits i and j; Z_i is diagonal. Filling entries directly keeps
    // the result exactly symmetric.
    for (Eigen::Index s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int q = 1; q <= n; ++q) diag += ((s >> qubit_bit(q, n)) & 1) ? -params.field : params.field;
        h(s, s) += diag;
        for (int a = 2; a <= n; ++a)
            for (int b = 1; b < a; ++b) {
                const double jab = params.couplings.j(a - 1, b - 1);
                if (jab == 0.0) continue;
                const Eigen::Index t = s ^ (Eigen::Index{1} << qubit_bit(a, n)) ^ (Eigen::Index{1} << qubit_bit(b, n));
                h(t, s) += jab;
            }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Jump operators

enum class JumpSet { both, lower, raise };

inline std::string_view to_string(JumpSet j) {
    switch (j) {
        case JumpSet::both: return "both";
        case JumpSet::lower: return "lower";
        case JumpSet::raise: return "raise";
    }
    return "?";
}

inline JumpSet parse_jump_set(std::string_view s) {
    if (s == "both") return JumpSet::both;
    if (s == "lower") return JumpSet::lower;
    if (s == "raise") return JumpSet::raise;
    throw InvalidSpecError("unknown jump set '" + std::string(s) + "' (expected both|lower|raise)");
}

/// Per qubit i = 1..n: sigma^+_i then sigma^-_i (for JumpSet::both), each
/// embedded at site i. All operators share the same rate.
inline std::vector<CMatrix> build_jump_operators(int n, JumpSet set = JumpSet::both) {
    if (n < 1) throw InvalidSpecError("jump operators need n >= 1");
    std::vector<CMatrix> ops;
    for (int q = 1; q <= n; ++q) {
        if (set != JumpSet::lower) ops.push_back(embed(pauli::raising(), q, n));
        if (set != JumpSet::raise) ops.push_back(embed(pauli::lowering(), q, n));
    }
    return ops;
}

// ---------------------------------------------------------------------------
// Density matrices

class DensityMatrix {
public:
    DensityMatrix() = default;

    /// Wraps a matrix without checking the state invariants; see validate().
    explicit DensityMatrix(CMatrix m) : data_(std::move(m)) {
        if (data_.rows() != data_.cols()) throw InvalidSpecError("density matrix must be square");
        n_ = qubits_for_dim(data_.rows());
    }

    static DensityMatrix maximally_mixed(int n) {
        const Eigen::Index d = Eigen::Index{1} << n;
        return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
    }
    static DensityMatrix from_pure(const CVector& psi) {
        const double norm = psi.norm();
        if (!(norm > 0.0)) throw DomainError("zero state vector");
        const CVector v = psi / norm;
        return DensityMatrix(v * v.adjoint());
    }
    /// |b_1 ... b_n><b_1 ... b_n| for a computational basis index.
    static DensityMatrix basis(int n, Eigen::Index index) {
        const Eigen::Index d = Eigen::Index{1} << n;
        CMatrix m = CMatrix::Zero(d, d);
        m(index, index) = 1.0;
        return DensityMatrix(std::move(m));
    }

    [[nodiscard]] const CMatrix& matrix() const { return data_; }
    [[nodiscard]] CMatrix& matrix() { return data_; }
    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] Eigen::Index dim() const { return data_.rows(); }

    [[nodiscard]] Complex trace() const { return data_.trace(); }
    [[nodiscard]] double purity() const { return (data_ * data_).trace().real(); }
    [[nodiscard]] double hermiticity_error() const { return (data_ - data_.adjoint()).cwiseAbs().maxCoeff(); }
    [[nodiscard]] double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(data_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    void hermitize() { data_ = (0.5 * (data_ + data_.adjoint())).eval(); }

    /// Throws NumericError when trace, Hermiticity or positivity fall outside tolerance.
    void validate(double tol = 1e-10, double eig_floor = -1e-8) const {
        if (!data_.allFinite()) throw NumericError("density matrix has non-finite entries");
        if (std::abs(trace() - 1.0) > tol) throw NumericError("density matrix trace deviates from 1");
        if (hermiticity_error() > tol) throw NumericError("density matrix not Hermitian");
        if (min_eigenvalue() < eig_floor) throw NumericError("density matrix has a negative eigenvalue");
    }

private:
    CMatrix data_;
    int n_ = 0;
};

// ---------------------------------------------------------------------------
// Lindblad generator and propagator

struct LindbladGenerator {
    CMatrix liouvillian;  // d^2 x d^2, column-stacking convention
    double gamma = 0.0;
};

/// Superoperator of d rho/dt = -i[H, rho] + gamma sum_k (L_k rho L_k^+ - {L_k^+ L_k, rho}/2).
inline LindbladGenerator build_liouvillian(const CMatrix& hamiltonian, std::span<const CMatrix> jumps, double gamma) {
    const Eigen::Index d = hamiltonian.rows();
    if (hamiltonian.cols() != d || d == 0) throw InvalidSpecError("Hamiltonian must be square and non-empty");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidSpecError("dissipation rate must be finite and >= 0");
    for (const auto& l : jumps)
        if (l.rows() != d || l.cols() != d) throw InvalidSpecError("jump operator dimension does not match Hamiltonian");

    const CMatrix id = CMatrix::Identity(d, d);
    CMatrix gen = -kI * (Eigen::kroneckerProduct(id, hamiltonian).eval() -
                         Eigen::kroneckerProduct(hamiltonian.transpose(), id).eval());
    if (gamma > 0.0) {
        for (const auto& l : jumps) {
            const CMatrix ldl = l.adjoint() * l;
            gen += gamma * Eigen::kroneckerProduct(l.conjugate(), l).eval();
            gen -= 0.5 * gamma * Eigen::kroneckerProduct(id, ldl).eval();
            gen -= 0.5 * gamma * Eigen::kroneckerProduct(ldl.transpose(), id).eval();
        }
    }
    return {std::move(gen), gamma};
}

struct Propagator {
    CMatrix matrix;  // exp(L dt)
    double dt = 0.0;
};

/// exp(L dt) by Pade scaling-and-squaring.
inline Propagator make_propagator(const LindbladGenerator& gen, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("propagator time step must be finite and > 0");
    if (!gen.liouvillian.allFinite()) throw NumericError("generator has non-finite entries");
    CMatrix scaled = gen.liouvillian * dt;
    CMatrix expm = scaled.exp();
    if (!expm.allFinite()) throw NumericError("matrix exponential overflowed");
    return {std::move(expm), dt};
}

inline DensityMatrix evolve(const DensityMatrix& rho, const Propagator& prop) {
    const Eigen::Index d = rho.dim();
    if (prop.matrix.rows() != d * d) throw InvalidSpecError("propagator does not match state dimension");
    CMatrix out(d, d);
    Eigen::Map<CVector>(out.data(), d * d).noalias() = prop.matrix * Eigen::Map<const CVector>(rho.matrix().data(), d * d);
    DensityMatrix result(std::move(out));
    result.hermitize();
    return result;
}

// ---------------------------------------------------------------------------
// Subsystems and observables

/// Reduced state on `keep` (1-based qubits). The reduced register orders the kept
/// qubits by increasing label.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    const int n = rho.n_qubits();
    if (keep.empty()) throw InvalidSpecError("partial trace must keep at least one qubit");
    std::vector<int> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) throw InvalidSpecError("duplicate qubit in keep set");
    for (int q : kept) check_qubit(q, n);

    std::vector<int> traced;
    for (int q = 1; q <= n; ++q)
        if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

    const int nk = static_cast<int>(kept.size());
    const int nt = static_cast<int>(traced.size());
    // full index = scatter(kept bits) | scatter(traced bits)
    auto scatter = [n](const std::vector<int>& qubits, Eigen::Index packed) {
        const int m = static_cast<int>(qubits.size());
        Eigen::Index full = 0;
        for (int k = 0; k < m; ++k)
            if ((packed >> (m - 1 - k)) & 1) full |= Eigen::Index{1} << qubit_bit(qubits[k], n);
        return full;
    };
    const Eigen::Index dk = Eigen::Index{1} << nk;
    const Eigen::Index dt = Eigen::Index{1} << nt;
    std::vector<Eigen::Index> kept_idx(dk), traced_idx(dt);
    for (Eigen::Index i = 0; i < dk; ++i) kept_idx[i] = scatter(kept, i);
    for (Eigen::Index t = 0; t < dt; ++t) traced_idx[t] = scatter(traced, t);

    const CMatrix& m = rho.matrix();
    CMatrix out = CMatrix::Zero(dk, dk);
    for (Eigen::Index j = 0; j < dk; ++j)
        for (Eigen::Index i = 0; i < dk; ++i) {
            Complex acc = 0.0;
            for (Eigen::Index t = 0; t < dt; ++t) acc += m(kept_idx[i] | traced_idx[t], kept_idx[j] | traced_idx[t]);
            out(i, j) = acc;
        }
    return DensityMatrix(std::move(out));
}

inline void check_input_value(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("input value " + std::to_string(s) + " outside [0, 1]");
}

/// Amplitudes of |psi_s> = sqrt(1-s)|0> + sqrt(s)|1>.
inline std::array<double, 2> input_amplitudes(double s) {
    check_input_value(s);
    return {std::sqrt(1.0 - s), std::sqrt(s)};
}

/// rho -> |psi_s><psi_s| (on the input qubit) tensor Tr_input[rho].
inline DensityMatrix inject_input(const DensityMatrix& rho, double s, int input_qubit = 1) {
    const auto amp = input_amplitudes(s);
    const int n = rho.n_qubits();
    check_qubit(input_qubit, n);
    std::vector<int> rest;
    for (int q = 1; q <= n; ++q)
        if (q != input_qubit) rest.push_back(q);
    const DensityMatrix reduced = partial_trace(rho, rest);

    const int bit = qubit_bit(input_qubit, n);
    const Eigen::Index d = rho.dim();
    // Remove the input bit from a full index to get the reduced index.
    auto squeeze = [bit](Eigen::Index i) {
        const Eigen::Index low = i & ((Eigen::Index{1} << bit) - 1);
        return ((i >> (bit + 1)) << bit) | low;
    };
    CMatrix out(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            out(i, j) = amp[(i >> bit) & 1] * amp[(j >> bit) & 1] * reduced.matrix()(squeeze(i), squeeze(j));
    return DensityMatrix(std::move(out));
}

/// Tr(rho Z_q), real part.
inline double expect_sigma_z(const DensityMatrix& rho, int qubit) {
    const int n = rho.n_qubits();
    check_qubit(qubit, n);
    const int bit = qubit_bit(qubit, n);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rho.dim(); ++i) acc += ((i >> bit) & 1) ? -rho.matrix()(i, i).real() : rho.matrix()(i, i).real();
    return acc;
}

/// Tr(rho O_q) for a single-qubit operator O embedded at qubit q.
inline Complex expect_local(const DensityMatrix& rho, const CMatrix& op, int qubit) {
    return (rho.matrix() * embed(op, qubit, rho.n_qubits())).trace();
}

}  // namespace qrc
