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

// Local-PCA covariance dimension of a state trajectory.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "qrc/common.hpp"

namespace qrc {

struct PcaConfig {
    int d = 32;             // cluster holds d + 1 points
    double epsilon = 1e-6;  // eigenvalue threshold, applied to raw eigenvalues
    int iterations = 200;
    std::uint64_t seed = 0;
    std::size_t washout = 0;  // leading points excluded from sampling and neighbour search

    void validate() const {
        if (d < 1) throw InvalidSpecError("PCA cluster parameter d must be >= 1");
        if (!(epsilon > 0.0)) throw InvalidSpecError("PCA epsilon must be > 0");
        if (iterations < 1) throw InvalidSpecError("PCA needs at least one iteration");
    }
};

/// Points are columns.
struct TrajectoryEmbedding {
    RMatrix points;

    [[nodiscard]] Eigen::Index size() const { return points.cols(); }
    [[nodiscard]] Eigen::Index dim() const { return points.rows(); }

    /// Real and imaginary parts of the column-stacked density matrices, concatenated.
    static TrajectoryEmbedding from_states(std::span<const CMatrix> states) {
        TrajectoryEmbedding e;
        if (states.empty()) return e;
        const Eigen::Index len = states.front().size();
        e.points.resize(2 * len, static_cast<Eigen::Index>(states.size()));
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].size() != len) throw InvalidSpecError("trajectory states differ in size");
            const Eigen::Map<const CVector> v(states[i].data(), len);
            e.points.col(static_cast<Eigen::Index>(i)).head(len) = v.real();
            e.points.col(static_cast<Eigen::Index>(i)).tail(len) = v.imag();
        }
        return e;
    }
};

/// Number of eigenvalues above epsilon of the sample covariance of the columns of
/// `cluster`. Uses the (d+1) x (d+1) Gram matrix, which has the same non-zero
/// spectrum as the dim x dim covariance.
inline int covariance_rank(const RMatrix& cluster, double epsilon) {
    const Eigen::Index m = cluster.cols();
    if (m < 2) return 0;
    const RMatrix centred = cluster.colwise() - cluster.rowwise().mean();
    const RMatrix gram = (centred.transpose() * centred) / static_cast<double>(m - 1);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(gram, Eigen::EigenvaluesOnly);
    return static_cast<int>((es.eigenvalues().array() > epsilon).count());
}

/// Mean, over random post-washout anchors, of the local covariance rank of the
/// anchor's d+1 nearest neighbours (the anchor included, Euclidean distance).
inline double covariance_dimension(const TrajectoryEmbedding& traj, const PcaConfig& cfg) {
    cfg.validate();
    const Eigen::Index total = traj.size();
    const auto first = static_cast<Eigen::Index>(cfg.washout);
    const Eigen::Index cluster_size = cfg.d + 1;
    if (total - first < cluster_size)
        throw InvalidSpecError("trajectory too short for a cluster of " + std::to_string(cluster_size) + " points after washout");

    const RMatrix pts = traj.points.rightCols(total - first);
    const Eigen::Index count = pts.cols();
    if ((pts.colwise() - pts.col(0)).cwiseAbs().maxCoeff() == 0.0) {
        warn("degenerate trajectory (all points identical); covariance dimension 0");
        return 0.0;
    }

    std::mt19937_64 engine(cfg.seed);
    std::vector<double> dist(static_cast<std::size_t>(count));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
    RMatrix cluster(pts.rows(), cluster_size);
    long sum = 0;
    for (int it = 0; it < cfg.iterations; ++it) {
        const auto anchor = static_cast<Eigen::Index>(uniform01(engine) * static_cast<double>(count));
        const RVector a = pts.col(anchor);
        for (Eigen::Index j = 0; j < count; ++j) dist[static_cast<std::size_t>(j)] = (pts.col(j) - a).squaredNorm();
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        // anchor first (distance 0), ties broken by index for determinism
        std::nth_element(order.begin(), order.begin() + (cluster_size - 1), order.end(), [&](Eigen::Index x, Eigen::Index y) {
            if (x == anchor || y == anchor) return x == anchor && y != anchor;
            const double dx = dist[static_cast<std::size_t>(x)], dy = dist[static_cast<std::size_t>(y)];
            return dx < dy || (dx == dy && x < y);
        });
        for (Eigen::Index c = 0; c < cluster_size; ++c) cluster.col(c) = pts.col(order[static_cast<std::size_t>(c)]);
        sum += covariance_rank(cluster, cfg.epsilon);
    }
    return static_cast<double>(sum) / cfg.iterations;
}

}  // namespace qrc
