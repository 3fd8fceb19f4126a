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

#ifndef FEATSEG_KMEANS_H_
#define FEATSEG_KMEANS_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace featseg {

struct KMeansOptions {
  int max_iterations = 300;
  // Stop once (previous - current) / previous inertia drops below this.
  double relative_tolerance = 1e-4;
};

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;  // k x D
  double inertia = 0.0;       // with the returned centroids
  // Inertia after each assignment step, one entry per Lloyd iteration.
  std::vector<double> inertia_history;
  int iterations = 0;
};

// Lloyd's algorithm on the rows of `points` (n x D) with k-means++ seeding.
// Empty clusters are reseeded at the point farthest from its own centroid.
// Deterministic for a given (points, k, seed).
KMeansResult kmeans_cluster(const Eigen::MatrixXd& points, int k, uint64_t seed,
                            const KMeansOptions& options = {});

}  // namespace featseg

#endif  // FEATSEG_KMEANS_H_
