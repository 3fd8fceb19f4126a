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

#ifndef FEATSEG_SPECTRAL_H_
#define FEATSEG_SPECTRAL_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "featseg/eigensolver.h"
#include "featseg/fusion.h"
#include "featseg/kmeans.h"
#include "featseg/tensor.h"

namespace featseg {

inline constexpr Extent kDefaultWorkingResolution{100, 100};
inline constexpr double kIsolatedDegree = 1e-12;

// Pixel affinity graph: clamped cosine similarity between feature vectors.
struct SimilarityGraph {
  Eigen::MatrixXd weights;  // symmetric, entries in [0, 1], unit diagonal

  Eigen::Index size() const { return weights.rows(); }
};

enum class LaplacianKind {
  kSymmetricNormalized,  // I - D^-1/2 W D^-1/2
  kUnnormalized,         // D - W
};

enum class EigenSolverKind {
  kAuto,     // dense up to kDenseSolverLimit nodes, block Lanczos above
  kDense,
  kLanczos,
};

inline constexpr Eigen::Index kDenseSolverLimit = 1024;

struct SpectralOptions {
  LaplacianKind laplacian = LaplacianKind::kSymmetricNormalized;
  EigenSolverKind solver = EigenSolverKind::kAuto;
  LanczosOptions lanczos;
  KMeansOptions kmeans;
};

// Cosine similarity between the rows of `vectors` (n x D), negatives clamped
// to 0, diagonal set to 1.
SimilarityGraph similarity_graph(const Eigen::MatrixXd& vectors);

// Resizes `features` to `working_resolution` and builds the graph over its
// pixels (row-major pixel order).
SimilarityGraph similarity_graph(const FusedFeatureMap& features,
                                 Extent working_resolution = kDefaultWorkingResolution);

Eigen::VectorXd graph_degrees(const SimilarityGraph& graph);

// Dense Laplacian. Nodes of zero degree use kIsolatedDegree.
Eigen::MatrixXd laplacian_matrix(const SimilarityGraph& graph, LaplacianKind kind);

// Embedding rows: the k smallest Laplacian eigenvectors, each row scaled to
// unit length (zero rows stay zero).
Eigen::MatrixXd spectral_embedding(const SimilarityGraph& graph, int k, uint64_t seed,
                                   const SpectralOptions& options = {});

// Cluster id per node, ids in [0, k).
std::vector<int> spectral_cluster(const SimilarityGraph& graph, int k, uint64_t seed,
                                  const SpectralOptions& options = {});

struct UnsupervisedOptions {
  Extent working_resolution = kDefaultWorkingResolution;
  SpectralOptions spectral;
};

// Spectral clusters at the working resolution become 0/1 weight maps that
// replace attention in the representative step; assignment then runs on the
// full-resolution features and the result is resized (nearest) to
// `output_resolution`.
ClusterMap unsup_segment(const FusedFeatureMap& features, int k, uint64_t seed,
                         Extent output_resolution,
                         const UnsupervisedOptions& options = {});

// Pixel-wise k-means on the fused features, resized (nearest) to
// `output_resolution`.
ClusterMap kmeans_segment(const FusedFeatureMap& features, int k, uint64_t seed,
                          Extent output_resolution, const KMeansOptions& options = {});

}  // namespace featseg

#endif  // FEATSEG_SPECTRAL_H_
