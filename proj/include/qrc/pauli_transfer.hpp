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

// Real Pauli-basis representation of states and propagators.
//
// A state is stored as c_p = Tr(rho P_p) over the 4^N Pauli strings, so that
// rho = 2^-N sum_p c_p P_p. The string index uses one base-4 digit per qubit
// (I=0, X=1, Y=2, Z=3), qubit 1 most significant. Hermiticity-preserving maps
// are real in this basis, which makes the reservoir loop a real GEMM, and the
// readout <Z_q> is a single coefficient.

#pragma once

#include <cmath>
#include <vector>

#include "qrc/quantum_core.hpp"

namespace qrc {

class PauliBasis {
public:
    explicit PauliBasis(int n) : n_(n), dim_(Eigen::Index{1} << n), size_(Eigen::Index{1} << (2 * n)) {
        if (n < 1 || n > 8) throw InvalidSpecError("Pauli basis supports 1..8 qubits");
        static const Complex table[4][2][2] = {
            {{1.0, 0.0}, {0.0, 1.0}},
            {{0.0, 1.0}, {1.0, 0.0}},
            {{0.0, -kI}, {kI, 0.0}},
            {{1.0, 0.0}, {0.0, -1.0}},
        };
        flip_.resize(size_);
        value_.resize(size_ * dim_);
        for (Eigen::Index p = 0; p < size_; ++p) {
            Eigen::Index flip = 0;
            for (int q = 1; q <= n; ++q) {
                const int a = digit(p, q);
                if (a == 1 || a == 2) flip |= Eigen::Index{1} << qubit_bit(q, n);
            }
            flip_[p] = flip;
            for (Eigen::Index row = 0; row < dim_; ++row) {
                const Eigen::Index col = row ^ flip;
                Complex v = 1.0;
                for (int q = 1; q <= n; ++q) {
                    const int bit = qubit_bit(q, n);
                    v *= table[digit(p, q)][(row >> bit) & 1][(col >> bit) & 1];
                }
                value_[p * dim_ + row] = v;
            }
        }
    }

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] Eigen::Index size() const { return size_; }

    /// Pauli digit (0..3) of qubit q in string p.
    [[nodiscard]] int digit(Eigen::Index p, int q) const { return static_cast<int>((p >> (2 * (n_ - q))) & 3); }
    [[nodiscard]] Eigen::Index stride(int q) const { return Eigen::Index{1} << (2 * (n_ - q)); }
    [[nodiscard]] Eigen::Index z_index(int q) const { return 3 * stride(q); }

    [[nodiscard]] RVector coefficients(const CMatrix& rho) const {
        RVector c(size_);
        for (Eigen::Index p = 0; p < size_; ++p) {
            Complex acc = 0.0;
            const Complex* v = &value_[p * dim_];
            for (Eigen::Index k = 0; k < dim_; ++k) acc += v[k] * rho(k ^ flip_[p], k);
            c[p] = acc.real();
        }
        return c;
    }

    template <class Derived>
    [[nodiscard]] CMatrix density(const Eigen::MatrixBase<Derived>& c) const {
        CMatrix rho = CMatrix::Zero(dim_, dim_);
        const double norm = 1.0 / static_cast<double>(dim_);
        for (Eigen::Index p = 0; p < size_; ++p) {
            const double cp = c[p];
            if (cp == 0.0) continue;
            const Complex* v = &value_[p * dim_];
            for (Eigen::Index k = 0; k < dim_; ++k) rho(k, k ^ flip_[p]) += norm * cp * v[k];
        }
        return rho;
    }

    /// P_p as a dense matrix.
    [[nodiscard]] CMatrix matrix(Eigen::Index p) const {
        CMatrix m = CMatrix::Zero(dim_, dim_);
        for (Eigen::Index k = 0; k < dim_; ++k) m(k, k ^ flip_[p]) = value_[p * dim_ + k];
        return m;
    }

private:
    int n_;
    Eigen::Index dim_;
    Eigen::Index size_;
    std::vector<Eigen::Index> flip_;
    std::vector<Complex> value_;  // value_[p*dim + row] = (P_p)(row, row ^ flip_[p])
};

/// The propagator exp(L dt) expressed as a real 4^N x 4^N matrix on Pauli coefficients.
struct PauliTransfer {
    RMatrix matrix;
    double dt = 0.0;
};

inline PauliTransfer make_pauli_transfer(const Propagator& prop, const PauliBasis& basis) {
    const Eigen::Index d = Eigen::Index{1} << basis.n_qubits();
    if (prop.matrix.rows() != d * d) throw InvalidSpecError("propagator does not match Pauli basis");
    const Eigen::Index size = basis.size();
    RMatrix r(size, size);
    const double norm = 1.0 / static_cast<double>(d);
    double imag_residual = 0.0;
    for (Eigen::Index q = 0; q < size; ++q) {
        const CMatrix pq = basis.matrix(q);
        CMatrix out(d, d);
        Eigen::Map<CVector>(out.data(), d * d).noalias() = prop.matrix * Eigen::Map<const CVector>(pq.data(), d * d);
        // Tr(P_p E(P_q)) is real for Hermiticity-preserving E; coefficients()
        // already drops the imaginary part, so check it here once.
        imag_residual = std::max(imag_residual, (out - out.adjoint()).cwiseAbs().maxCoeff());
        r.col(q) = norm * basis.coefficients(out);
    }
    if (imag_residual > 1e-8) throw NumericError("propagator is not Hermiticity-preserving");
    return {std::move(r), prop.dt};
}

/// Replaces the input qubit by |psi_s><psi_s| in coefficient space. Columns of
/// `states` are independent Pauli-coefficient vectors.
template <class Derived>
void inject_pauli(Eigen::MatrixBase<Derived>& states, Eigen::Index column, double s, const PauliBasis& basis, int input_qubit = 1) {
    check_input_value(s);
    // <psi_s| sigma_a |psi_s> for a = I, X, Y, Z
    const double bloch[4] = {1.0, 2.0 * std::sqrt(s * (1.0 - s)), 0.0, 1.0 - 2.0 * s};
    const Eigen::Index stride = basis.stride(input_qubit);
    const Eigen::Index size = basis.size();
    auto col = states.col(column);
    for (Eigen::Index high = 0; high < size; high += 4 * stride)
        for (Eigen::Index low = 0; low < stride; ++low) {
            const Eigen::Index base = high + low;
            const double reduced = col[base];
            col[base + stride] = bloch[1] * reduced;
            col[base + 2 * stride] = bloch[2] * reduced;
            col[base + 3 * stride] = bloch[3] * reduced;
        }
}

}  // namespace qrc
