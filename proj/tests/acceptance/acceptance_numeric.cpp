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

// Acceptance criteria 1-6: numerical correctness against independent oracles.

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "acceptance_common.hpp"
#include "oracles.hpp"
#include "qrc/pca.hpp"
#include "qrc/train_eval.hpp"

using namespace qrc;
using qrc::acceptance::sci;

namespace {

// Pinned tolerances.
constexpr double kLiouvillianTol = 1e-12;
constexpr double kPropagatorTol = 1e-6;
constexpr double kPropagatorSeconds = 60.0;
constexpr double kTraceTol = 1e-8;
constexpr double kHermiticityTol = 1e-10;
constexpr double kEigenFloor = -1e-8;
constexpr double kPurityDriftTol = 1e-8;
constexpr double kBellTol = 1e-10;
constexpr double kSeparableTol = 1e-9;
constexpr double kLocalUnitaryTol = 1e-10;
constexpr double kInjectionTol = 1e-10;
constexpr double kRidgeTol = 1e-8;
constexpr double kAffineTol = 1e-12;
constexpr double kNarmaTol = 1e-10;

std::vector<CMatrix> oracle_jumps(int n) {
    CMatrix up = CMatrix::Zero(2, 2), down = CMatrix::Zero(2, 2);
    up(0, 1) = 1.0;
    down(1, 0) = 1.0;
    std::vector<CMatrix> out;
    for (int q = 1; q <= n; ++q) {
        out.push_back(oracle::site_operator(up, q, n));
        out.push_back(oracle::site_operator(down, q, n));
    }
    return out;
}

CMatrix oracle_hamiltonian(const CouplingMatrix& c, double h) {
    const int n = c.n();
    CMatrix x = CMatrix::Zero(2, 2), z = CMatrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    const Eigen::Index d = Eigen::Index{1} << n;
    CMatrix out = CMatrix::Zero(d, d);
    for (int i = 1; i <= n; ++i) {
        out += h * oracle::site_operator(z, i, n);
        for (int j = 1; j < i; ++j) out += c.j(i - 1, j - 1) * oracle::site_operator(x, i, n) * oracle::site_operator(x, j, n);
    }
    return out;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

int main() {
    acceptance::Gate gate;
    std::mt19937_64 rng(20260515);

    gate.criterion(1, "Liouvillian vs direct master-equation RHS, 100 random 2- and 4-qubit states", [&](std::string& d) {
        double worst = 0.0;
        for (int n : {2, 4}) {
            const auto couplings = sample_couplings(1.0, 7 + n, n);
            HamiltonianParams hp{couplings, 2.0};
            const CMatrix h = build_hamiltonian(hp);
            const double gamma = 0.05;
            const auto gen = build_liouvillian(h, build_jump_operators(n, JumpSet::both), gamma);
            const CMatrix h_ref = oracle_hamiltonian(couplings, 2.0);
            const auto jumps_ref = oracle_jumps(n);
            for (int t = 0; t < 100; ++t) {
                const CMatrix rho = oracle::random_density(n, rng);
                const CMatrix direct = oracle::lindblad_rhs(h_ref, jumps_ref, gamma, rho);
                const CVector lv = gen.liouvillian * Eigen::Map<const CVector>(rho.data(), rho.size());
                worst = std::max(worst, (lv - Eigen::Map<const CVector>(direct.data(), direct.size())).cwiseAbs().maxCoeff());
            }
        }
        d = "max |diff| " + sci(worst) + " (tol " + sci(kLiouvillianTol) + ")";
        return worst < kLiouvillianTol;
    });

    gate.criterion(2, "propagator vs adaptive Runge-Kutta oracle, 10 substeps dt=0.25, J_s=1, Gamma=0.01", [&](std::string& d) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto couplings = sample_couplings(1.0, 99, 4);
        const CMatrix h = build_hamiltonian({couplings, 2.0});
        const auto prop = make_propagator(build_liouvillian(h, build_jump_operators(4, JumpSet::both), 0.01), 0.25);
        const CMatrix h_ref = oracle_hamiltonian(couplings, 2.0);
        const auto jumps_ref = oracle_jumps(4);
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const CMatrix rho0 = oracle::random_density(4, rng);
            DensityMatrix rho(rho0);
            CMatrix ref = rho0;
            for (int k = 0; k < 10; ++k) {
                rho = evolve(rho, prop);
                ref = oracle::integrate_lindblad(h_ref, jumps_ref, 0.01, ref, 0.25);
                worst = std::max(worst, max_abs(rho.matrix() - ref));
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        d = "max elementwise diff " + sci(worst) + " (tol " + sci(kPropagatorTol) + "), runtime " + sci(secs) + " s (limit 60 s)";
        return worst < kPropagatorTol && secs < kPropagatorSeconds;
    });

    gate.criterion(3, "CPTP invariants over 1e4 injections; unitary purity drift over 1e3 steps", [&](std::string& d) {
        RunConfig cfg;
        cfg.hamiltonian.couplings = sample_couplings(1.0, 5, 4);
        cfg.gamma = 0.01;
        const Reservoir res(cfg);
        const auto input = gen_random_input(10000, 17);

        // density-matrix path, every substep
        double tr = 0.0, herm = 0.0, eig = std::numeric_limits<double>::infinity();
        DensityMatrix rho = DensityMatrix::maximally_mixed(4);
        for (double s : input.values) {
            rho = inject_input(rho, s);
            for (int v = 0; v < cfg.v_nodes; ++v) {
                // evolve() symmetrizes its output, so measure Hermiticity on the raw product first
                CMatrix raw(16, 16);
                Eigen::Map<CVector>(raw.data(), 256) = res.propagator().matrix * Eigen::Map<const CVector>(rho.matrix().data(), 256);
                herm = std::max(herm, (raw - raw.adjoint()).cwiseAbs().maxCoeff());
                rho = evolve(rho, res.propagator());
                tr = std::max(tr, std::abs(rho.trace() - 1.0));
                eig = std::min(eig, rho.min_eigenvalue());
            }
        }
        // production path: last 500 injections of the same run, every substep (Hermitian by construction)
        RunConfig sampled = cfg;
        sampled.washout = 9500;
        sampled.record_states = true;
        const auto run = Reservoir(sampled).run(input);
        for (const auto& m : run.diagnostics.states) {
            const DensityMatrix s(m);
            tr = std::max(tr, std::abs(s.trace() - 1.0));
            eig = std::min(eig, s.min_eigenvalue());
        }
        // unitary purity
        RunConfig unitary = cfg;
        unitary.gamma = 0.0;
        const Reservoir ures(unitary);
        CVector psi = oracle::random_complex(16, 1, rng);
        psi.normalize();
        DensityMatrix pure = DensityMatrix::from_pure(psi);
        double drift = 0.0;
        for (int k = 0; k < 1000; ++k) {
            pure = evolve(pure, ures.propagator());
            drift = std::max(drift, std::abs(pure.purity() - 1.0));
        }
        d = "|Tr-1| " + sci(tr) + ", hermiticity " + sci(herm) + ", min eig " + sci(eig) + ", purity drift " + sci(drift) +
            " (tols " + sci(kTraceTol) + ", " + sci(kHermiticityTol) + ", " + sci(kEigenFloor) + ", " + sci(kPurityDriftTol) + "); " +
            std::to_string(run.diagnostics.states.size()) + " production states checked";
        return tr < kTraceTol && herm < kHermiticityTol && eig > kEigenFloor && drift < kPurityDriftTol;
    });

    gate.criterion(4, "entanglement oracles: Bell pair, separable mixtures, local unitaries, post-injection cut", [&](std::string& d) {
        // Bell pair on qubits 1-2, spectators in |00>
        CVector bell = CVector::Zero(4);
        bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
        CMatrix zero = CMatrix::Zero(4, 4);
        zero(0, 0) = 1.0;
        const DensityMatrix bell_state(oracle::kron(bell * bell.adjoint(), zero));
        const double en_bell = log_negativity(bell_state, Bipartition({1}, 4));
        const double en_bell_ref = std::log2(oracle::trace_norm_hermitian(oracle::partial_transpose_leading(bell_state.matrix(), 4, 1)));
        const double bell_err = std::max(std::abs(en_bell - 1.0), std::abs(en_bell_ref - 1.0));

        double sep = 0.0;
        std::uniform_int_distribution<int> terms(1, 6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 50; ++t) {
            CMatrix mix = CMatrix::Zero(16, 16);
            double wsum = 0.0;
            for (int k = terms(rng); k > 0; --k) {
                CMatrix prod = CMatrix::Identity(1, 1);
                for (int q = 0; q < 4; ++q) prod = oracle::kron(prod, oracle::random_density(1, rng));
                const double w = u(rng);
                mix += w * prod;
                wsum += w;
            }
            const DensityMatrix rho(mix / wsum);
            for (const auto& p : all_bipartitions(4)) sep = std::max(sep, log_negativity(rho, p));
        }

        double lu = 0.0;
        for (int t = 0; t < 20; ++t) {
            const CMatrix rho = oracle::random_pure(4, rng);
            for (const auto& p : all_bipartitions(4)) {
                // local unitary factored along the cut: product of single-qubit unitaries
                CMatrix local = CMatrix::Identity(1, 1);
                for (int q = 0; q < 4; ++q) local = oracle::kron(local, oracle::random_unitary(2, rng));
                lu = std::max(lu, std::abs(log_negativity(DensityMatrix(rho), p) - log_negativity(DensityMatrix(local * rho * local.adjoint()), p)));
            }
        }

        RunConfig cfg;
        cfg.hamiltonian.couplings = sample_couplings(0.5, 3, 4);
        cfg.gamma = 0.0;
        cfg.washout = 50;
        cfg.record_states = true;
        cfg.diagnostic_steps = 20;
        const auto input = gen_random_input(200, 4);
        const auto run = Reservoir(cfg).run(input);
        double inj = 0.0, before = 0.0;
        for (std::size_t i = 0; i < run.diagnostics.states.size(); ++i) {
            const DensityMatrix rho(run.diagnostics.states[i]);
            before = std::max(before, log_negativity(rho, Bipartition({1}, 4)));
            inj = std::max(inj, std::abs(log_negativity(inject_input(rho, input[i % input.size()]), Bipartition({1}, 4))));
        }
        d = "Bell |E_N-1| " + sci(bell_err) + ", separable max " + sci(sep) + ", local-unitary diff " + sci(lu) +
            ", post-injection qubit-1 E_N " + sci(inj) + " (pre-injection up to " + sci(before) + ")";
        return bell_err < kBellTol && sep < kSeparableTol && lu < kLocalUnitaryTol && inj < kInjectionTol;
    });

    gate.criterion(5, "ridge vs dense solve; capacity affine invariance; PCA subspace dimensions 1, 2, 3", [&](std::string& d) {
        std::normal_distribution<double> g;
        auto gauss = [&](Eigen::Index r, Eigen::Index c) {
            RMatrix m(r, c);
            for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
            return m;
        };
        double ridge = 0.0;
        for (int t = 0; t < 20; ++t) {
            const RMatrix x = gauss(50, 5);
            const RVector y = gauss(50, 1);
            RMatrix a(50, 6);
            a << x, RVector::Ones(50);
            RMatrix lhs = a.transpose() * a;
            for (int i = 0; i < 5; ++i) lhs(i, i) += 0.1;
            const RVector ref = lhs.partialPivLu().solve(a.transpose() * y);
            ridge = std::max(ridge, (RidgeSolver(x).fit(y, 0.1).weights - ref).cwiseAbs().maxCoeff());
        }
        double affine = 0.0;
        for (int t = 0; t < 20; ++t) {
            const RVector y = gauss(2000, 1);
            const RVector p = y + gauss(2000, 1);
            const double base = memory_capacity(p, y);
            for (double a : {-5.0, 0.01, 3.0})
                affine = std::max(affine, std::abs(memory_capacity(RVector((a * p).array() + 2.5), y) - base));
        }
        std::vector<double> dims;
        for (Eigen::Index k : {1, 2, 3}) {
            const RMatrix basis = Eigen::HouseholderQR<RMatrix>(gauss(512, k)).householderQ() * RMatrix::Identity(512, k);
            TrajectoryEmbedding t;
            t.points = (basis * gauss(k, 400)).colwise() + RVector(gauss(512, 1));
            PcaConfig cfg;
            cfg.d = 20;
            cfg.iterations = 50;
            dims.push_back(covariance_dimension(t, cfg));
        }
        d = "ridge max diff " + sci(ridge) + " (tol " + sci(kRidgeTol) + "), affine max diff " + sci(affine) + " (tol " + sci(kAffineTol) +
            "), PCA dims " + sci(dims[0]) + ", " + sci(dims[1]) + ", " + sci(dims[2]);
        return ridge < kRidgeTol && affine < kAffineTol && dims == std::vector<double>{1.0, 2.0, 3.0};
    });

    gate.criterion(6, "NARMA fixed point under zero input vs fixed-point iteration", [&](std::string& d) {
        double worst = 0.0;
        InputSeries zeros;
        zeros.values.assign(2000, 0.0);
        const NarmaConstants c;
        for (int n : {2, 5, 10, 20}) {
            // oracle: y* solves y = alpha y + n beta y^2 + delta; take the smaller root in closed form
            const double a = n * c.beta, b = c.alpha - 1.0;
            const double root = (-b - std::sqrt(b * b - 4.0 * a * c.delta)) / (2.0 * a);
            double it = 0.0;
            for (int k = 0; k < 100000; ++k) it = c.alpha * it + n * c.beta * it * it + c.delta;
            worst = std::max({worst, std::abs(target_narma(zeros, n, c).values.back() - it), std::abs(it - root)});
        }
        d = "max |y - y*| " + sci(worst) + " over n = 2, 5, 10, 20 (tol " + sci(kNarmaTol) + ")";
        return worst < kNarmaTol;
    });

    return gate.finish();
}
