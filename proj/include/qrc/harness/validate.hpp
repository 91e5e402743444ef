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

// Self-check suite behind `qrc validate`: fast invariants of every module on
// random instances.

#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qrc/pca.hpp"
#include "qrc/train_eval.hpp"

namespace qrc::harness {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline CMatrix random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const Eigen::Index d = Eigen::Index{1} << n;
    CMatrix a(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) a(i, j) = Complex(g(rng), g(rng));
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace();
}

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace detail

inline std::vector<CheckResult> run_validation(std::uint64_t seed = 1) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        try {
            const auto [ok, detail] = body();
            out.push_back({name, ok, detail});
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("exception: ") + e.what()});
        }
    };

    HamiltonianParams hp;
    hp.couplings = sample_couplings(1.0, seed, 4);
    const CMatrix h = build_hamiltonian(hp);
    const auto jumps = build_jump_operators(4, JumpSet::both);
    const auto gen = build_liouvillian(h, jumps, 0.01);

    check("liouvillian matches direct master equation", [&] {
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            const CMatrix rho = detail::random_state(4, rng);
            CMatrix direct = -kI * (h * rho - rho * h);
            for (const auto& l : jumps) {
                const CMatrix ldl = l.adjoint() * l;
                direct += 0.01 * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
            }
            const CVector v = gen.liouvillian * Eigen::Map<const CVector>(rho.data(), rho.size());
            worst = std::max(worst, (v - Eigen::Map<const CVector>(direct.data(), direct.size())).cwiseAbs().maxCoeff());
        }
        return std::pair{worst < 1e-12, "max diff " + detail::sci(worst)};
    });

    check("propagator semigroup", [&] {
        const auto p1 = make_propagator(gen, 0.25);
        const auto p2 = make_propagator(gen, 0.5);
        const double d = (p1.matrix * p1.matrix - p2.matrix).cwiseAbs().maxCoeff();
        return std::pair{d < 1e-10, "max diff " + detail::sci(d)};
    });

    check("CPTP invariants over 1000 injections", [&] {
        RunConfig c;
        c.hamiltonian = hp;
        c.gamma = 0.05;
        c.washout = 0;
        const Reservoir res(c);
        const auto prop = res.propagator();
        DensityMatrix rho = DensityMatrix::maximally_mixed(4);
        const auto s = gen_random_input(1000, seed);
        double tr = 0.0, herm = 0.0, eig = 0.0;
        for (double v : s.values) {
            rho = inject_input(rho, v);
            for (int k = 0; k < c.v_nodes; ++k) rho = evolve(rho, prop);
            tr = std::max(tr, std::abs(rho.trace() - 1.0));
            herm = std::max(herm, rho.hermiticity_error());
            eig = std::min(eig, rho.min_eigenvalue());
        }
        return std::pair{tr < 1e-8 && herm < 1e-10 && eig > -1e-8,
                         "trace " + detail::sci(tr) + ", hermiticity " + detail::sci(herm) + ", min eig " + detail::sci(eig)};
    });

    check("Bell pair log-negativity is 1", [&] {
        CVector psi = CVector::Zero(16);
        psi[0] = psi[12] = 1.0 / std::sqrt(2.0);  // (|00> + |11>) on qubits 1-2, |00> on 3-4
        const double en = log_negativity(DensityMatrix(CMatrix(psi * psi.adjoint())), Bipartition({1}, 4));
        return std::pair{std::abs(en - 1.0) < 1e-10, "E_N " + detail::sci(en)};
    });

    check("injection disentangles the input qubit", [&] {
        CVector psi = CVector::Zero(16);
        psi[0] = psi[15] = 1.0 / std::sqrt(2.0);
        const auto after = inject_input(DensityMatrix(CMatrix(psi * psi.adjoint())), 0.3);
        const double en = mean_log_negativity(after).isolating(1);
        return std::pair{std::abs(en) < 1e-10, "E_N " + detail::sci(en)};
    });

    check("ridge stationarity", [&] {
        std::normal_distribution<double> g;
        RMatrix x(60, 6);
        RVector y(60);
        for (Eigen::Index i = 0; i < 60; ++i) {
            y[i] = g(rng);
            for (Eigen::Index j = 0; j < 6; ++j) x(i, j) = g(rng) + 1.0;
        }
        const auto m = RidgeSolver(x).fit(y, 0.1);
        const RVector w = m.weights.head(6);
        const RVector res = (x * w).array() + m.bias() - y.array();
        const double grad = (x.transpose() * res + 0.1 * w).norm() / (x.transpose() * y).norm();
        return std::pair{grad < 1e-8, "relative gradient " + detail::sci(grad)};
    });

    check("capacity affine invariance", [&] {
        const auto a = gen_random_input(500, seed + 1);
        const auto b = gen_random_input(500, seed + 2);
        std::vector<double> mixed(500), scaled(500);
        for (std::size_t i = 0; i < 500; ++i) {
            mixed[i] = a[i] + 0.5 * b[i];
            scaled[i] = -3.0 * mixed[i] + 7.0;
        }
        const double d = std::abs(memory_capacity(mixed, a.values) - memory_capacity(scaled, a.values));
        return std::pair{d < 1e-12, "diff " + detail::sci(d)};
    });

    check("covariance dimension of a plane", [&] {
        std::normal_distribution<double> g;
        RMatrix basis(64, 2);
        for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = g(rng);
        RMatrix coeff(2, 200);
        for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff.data()[i] = g(rng);
        TrajectoryEmbedding t;
        t.points = basis * coeff;
        PcaConfig cfg;
        cfg.d = 10;
        cfg.iterations = 20;
        const double dim = covariance_dimension(t, cfg);
        return std::pair{dim == 2.0, "dimension " + detail::sci(dim)};
    });

    check("NARMA fixed point under zero input", [&] {
        InputSeries zeros;
        zeros.values.assign(400, 0.0);
        const NarmaConstants c;
        double y = 0.0;
        for (int i = 0; i < 10000; ++i) y = c.alpha * y + 2 * c.beta * y * y + c.delta;
        const double d = std::abs(target_narma(zeros, 2, c).values.back() - y);
        return std::pair{d < 1e-10, "diff " + detail::sci(d)};
    });

    check("fading memory", [&] {
        RunConfig c;
        c.hamiltonian = hp;
        c.gamma = 0.01;
        const Reservoir res(c);
        const auto s = gen_random_input(300, seed);
        const auto a = res.run(s);
        const auto b = res.run(s, DensityMatrix(detail::random_state(4, rng)));
        const double d = (a.readout.rows.bottomRows(200) - b.readout.rows.bottomRows(200)).cwiseAbs().maxCoeff();
        return std::pair{d < 1e-6, "post-washout diff " + detail::sci(d)};
    });

    return out;
}

}  // namespace qrc::harness
