/* Copyright 2026 The featseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "featseg/kmeans.h"

#include <limits>
#include <random>
#include <string>

#include "featseg/error.h"

namespace featseg {
namespace {

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& points, int k,
                                std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centroids.row(0) = points.row(pick(rng));

  Eigen::VectorXd closest = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = closest.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double running = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        running += closest[i];
        if (running > target && closest[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      // Guard against rounding landing on an already chosen point.
      while (closest[chosen] == 0.0 && chosen > 0) --chosen;
    } else {
      chosen = pick(rng);
    }
    centroids.row(c) = points.row(chosen);
    closest = closest.cwiseMin(
        (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

// Assigns each point to its nearest centroid (lowest id on ties); returns
// the inertia and per-point squared distances.
double assign(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
              std::vector<int>& labels, Eigen::VectorXd& dist) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centroids.rows();
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    labels[i] = best_c;
    dist[i] = best;
    inertia += best;
  }
  return inertia;
}

void update_centroids(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                      const Eigen::VectorXd& dist, Eigen::MatrixXd& centroids) {
  const Eigen::Index k = centroids.rows();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
  std::vector<Eigen::Index> counts(k, 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[i]) += points.row(i);
    ++counts[labels[i]];
  }
  std::vector<bool> taken(points.rows(), false);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      continue;
    }
    // Empty: move to the point farthest from its assigned centroid.
    Eigen::Index far = -1;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (taken[i]) continue;
      if (far < 0 || dist[i] > dist[far]) far = i;
    }
    taken[far] = true;
    centroids.row(c) = points.row(far);
  }
}

}  // namespace

KMeansResult kmeans_cluster(const Eigen::MatrixXd& points, int k, uint64_t seed,
                            const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw InputError("k must be at least 1");
  if (k > n) {
    throw InputError("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                     " points");
  }
  if (!points.allFinite()) throw NumericalError("k-means input is not finite");

  std::mt19937_64 rng(seed);
  KMeansResult result;
  result.centroids = plus_plus_seeds(points, k, rng);
  result.labels.assign(n, 0);
  Eigen::VectorXd dist(n);

  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    const double inertia = assign(points, result.centroids, result.labels, dist);
    result.inertia_history.push_back(inertia);
    result.iterations = it + 1;
    const bool converged =
        inertia == 0.0 ||
        (std::isfinite(previous) && (previous - inertia) / previous < options.relative_tolerance);
    update_centroids(points, result.labels, dist, result.centroids);
    if (converged) break;
    previous = inertia;
  }
  // Inertia of the returned labels against the returned centroids.
  result.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.inertia += (points.row(i) - result.centroids.row(result.labels[i])).squaredNorm();
  }
  return result;
}

}  // namespace featseg
