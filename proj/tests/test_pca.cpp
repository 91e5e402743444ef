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

#include <gtest/gtest.h>

#include <random>

#include "qrc/pca.hpp"

namespace qrc {
namespace {

RMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    RMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
    return m;
}

/// `count` points x0 + B c with B an ambient x k orthonormal basis and c Gaussian.
TrajectoryEmbedding affine_subspace(Eigen::Index ambient, Eigen::Index k, Eigen::Index count, std::mt19937_64& rng) {
    const RMatrix basis = Eigen::HouseholderQR<RMatrix>(gaussian(ambient, k, rng)).householderQ() * RMatrix::Identity(ambient, k);
    const RVector offset = gaussian(ambient, 1, rng);
    TrajectoryEmbedding t;
    t.points = (basis * gaussian(k, count, rng)).colwise() + offset;
    return t;
}

TEST(CovarianceDimension, StraightLine) {
    TrajectoryEmbedding t;
    t.points.resize(10, 100);
    RVector dir = RVector::LinSpaced(10, 1.0, 2.0);
    for (Eigen::Index i = 0; i < 100; ++i) t.points.col(i) = 0.1 * static_cast<double>(i) * dir;
    PcaConfig cfg;
    cfg.d = 8;
    cfg.iterations = 50;
    EXPECT_EQ(covariance_dimension(t, cfg), 1.0);
}

TEST(CovarianceDimension, IdenticalPointsWarn) {
    TrajectoryEmbedding t;
    t.points = RMatrix::Constant(6, 40, 0.25);
    PcaConfig cfg;
    cfg.d = 5;
    set_warnings_enabled(false);
    const auto before = warning_count();
    EXPECT_EQ(covariance_dimension(t, cfg), 0.0);
    EXPECT_EQ(warning_count(), before + 1);
    set_warnings_enabled(true);
}

TEST(CovarianceDimension, RecoversSubspaceDimension) {
    std::mt19937_64 rng(1);
    PcaConfig cfg;
    cfg.d = 20;
    cfg.iterations = 30;
    for (Eigen::Index k : {1, 2, 3}) EXPECT_EQ(covariance_dimension(affine_subspace(512, k, 300, rng), cfg), static_cast<double>(k));
}

TEST(CovarianceDimension, BoundedByClusterAndEmbedding) {
    std::mt19937_64 rng(2);
    TrajectoryEmbedding t;
    t.points = gaussian(50, 200, rng);
    PcaConfig cfg;
    cfg.d = 10;
    cfg.iterations = 20;
    EXPECT_EQ(covariance_dimension(t, cfg), 10.0);  // d + 1 centred points span d dimensions
    t.points = gaussian(4, 200, rng);
    EXPECT_EQ(covariance_dimension(t, cfg), 4.0);
}

TEST(CovarianceDimension, RigidMotionInvariance) {
    std::mt19937_64 rng(3);
    // Curved 4-dimensional manifold with graded spread inside a 64-dim space.
    TrajectoryEmbedding t;
    t.points = RMatrix::Zero(64, 400);
    for (Eigen::Index i = 0; i < 400; ++i) {
        const double u = 0.05 * static_cast<double>(i);
        t.points(0, i) = std::cos(u);
        t.points(1, i) = std::sin(u);
        t.points(2, i) = 0.1 * std::cos(3 * u);
        t.points(3, i) = 0.01 * std::sin(7 * u);
    }
    PcaConfig cfg;
    cfg.d = 12;
    cfg.iterations = 40;
    cfg.seed = 77;
    cfg.epsilon = 1e-9;
    const double base = covariance_dimension(t, cfg);

    const RMatrix q = Eigen::HouseholderQR<RMatrix>(gaussian(64, 64, rng)).householderQ();
    TrajectoryEmbedding moved;
    const RVector shift = gaussian(64, 1, rng);
    moved.points = (q * t.points).colwise() + shift;
    EXPECT_EQ(covariance_dimension(moved, cfg), base);
}

TEST(CovarianceDimension, MonotoneInEpsilonAndDeterministic) {
    std::mt19937_64 rng(4);
    TrajectoryEmbedding t;
    t.points = gaussian(16, 300, rng);
    for (Eigen::Index r = 0; r < 16; ++r) t.points.row(r) *= std::pow(10.0, -0.5 * static_cast<double>(r));
    PcaConfig cfg;
    cfg.d = 20;
    cfg.iterations = 30;
    cfg.seed = 5;
    double previous = 1e9;
    for (double eps : {1e-14, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
        cfg.epsilon = eps;
        const double dim = covariance_dimension(t, cfg);
        EXPECT_LE(dim, previous);
        EXPECT_EQ(dim, covariance_dimension(t, cfg));
        previous = dim;
    }
    EXPECT_LT(previous, 3.0);
}

TEST(CovarianceDimension, WashoutAndValidation) {
    std::mt19937_64 rng(5);
    TrajectoryEmbedding t;
    t.points = gaussian(8, 30, rng);
    PcaConfig cfg;
    cfg.d = 5;
    cfg.washout = 25;
    EXPECT_THROW(covariance_dimension(t, cfg), InvalidSpecError);
    cfg.washout = 0;
    cfg.d = 0;
    EXPECT_THROW(covariance_dimension(t, cfg), InvalidSpecError);
}

TEST(TrajectoryEmbedding, RealAndImaginaryParts) {
    CMatrix a(2, 2);
    a << Complex(1, 0), Complex(0, 2), Complex(0, -2), Complex(3, 0);
    const std::vector<CMatrix> states{a, 2.0 * a};
    const auto e = TrajectoryEmbedding::from_states(states);
    ASSERT_EQ(e.dim(), 8);
    ASSERT_EQ(e.size(), 2);
    RVector expect(8);
    expect << 1, 0, 0, 3, 0, -2, 2, 0;
    EXPECT_EQ(RVector(e.points.col(0)), expect);
    // Euclidean distance equals the Frobenius distance of the matrices
    EXPECT_NEAR((e.points.col(1) - e.points.col(0)).norm(), (a).norm(), 1e-15);
}

}  // namespace
}  // namespace qrc
