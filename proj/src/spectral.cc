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

#include "featseg/spectral.h"

#include <cmath>
#include <string>

#include "featseg/assign.h"
#include "featseg/error.h"

namespace featseg {
namespace {

Eigen::MatrixXd to_matrix(const FusedFeatureMap& features) {
  Eigen::MatrixXd m(features.pixels(), features.dim);
  for (int64_t i = 0; i < features.pixels(); ++i) {
    for (int d = 0; d < features.dim; ++d) m(i, d) = features.data[i * features.dim + d];
  }
  return m;
}

Eigen::VectorXd safe_degrees(const SimilarityGraph& graph) {
  Eigen::VectorXd deg = graph_degrees(graph);
  for (Eigen::Index i = 0; i < deg.size(); ++i) {
    if (deg[i] <= 0.0) deg[i] = kIsolatedDegree;
  }
  return deg;
}

void check_symmetric(const SimilarityGraph& graph) {
  const Eigen::MatrixXd& w = graph.weights;
  if (w.rows() != w.cols()) throw InputError("similarity graph must be square");
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InputError("similarity graph is not symmetric");
  }
}

}  // namespace

SimilarityGraph similarity_graph(const Eigen::MatrixXd& vectors) {
  if (!vectors.allFinite()) throw NumericalError("features are not finite");
  Eigen::MatrixXd unit = vectors;
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double norm = unit.row(i).norm();
    if (norm < kNormEpsilon) {
      unit.row(i).setZero();
    } else {
      unit.row(i) /= norm;
    }
  }
  const Eigen::Index n = unit.rows();
  SimilarityGraph graph;
  graph.weights = Eigen::MatrixXd::Zero(n, n);
  graph.weights.selfadjointView<Eigen::Lower>().rankUpdate(unit);
  // Mirror the computed lower triangle.
  graph.weights.triangularView<Eigen::StrictlyUpper>() = graph.weights.transpose();
  graph.weights = graph.weights.cwiseMax(0.0).cwiseMin(1.0);
  graph.weights.diagonal().setOnes();
  return graph;
}

SimilarityGraph similarity_graph(const FusedFeatureMap& features,
                                 Extent working_resolution) {
  return similarity_graph(to_matrix(resize_features(features, working_resolution)));
}

Eigen::VectorXd graph_degrees(const SimilarityGraph& graph) {
  return graph.weights.rowwise().sum();
}

Eigen::MatrixXd laplacian_matrix(const SimilarityGraph& graph, LaplacianKind kind) {
  const Eigen::VectorXd deg = safe_degrees(graph);
  const Eigen::Index n = graph.size();
  if (kind == LaplacianKind::kUnnormalized) {
    Eigen::MatrixXd lap = -graph.weights;
    lap.diagonal() += graph_degrees(graph);
    return lap;
  }
  const Eigen::VectorXd inv_sqrt = deg.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * graph.weights * inv_sqrt.asDiagonal());
  lap.diagonal() += Eigen::VectorXd::Ones(n);
  return lap;
}

Eigen::MatrixXd spectral_embedding(const SimilarityGraph& graph, int k, uint64_t seed,
                                   const SpectralOptions& options) {
  check_symmetric(graph);
  const Eigen::Index n = graph.size();
  if (k < 1 || k > n) {
    throw InputError("k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  const bool dense = options.solver == EigenSolverKind::kDense ||
                     (options.solver == EigenSolverKind::kAuto && n <= kDenseSolverLimit);
  EigenPairs pairs;
  if (dense) {
    pairs = dense_smallest(laplacian_matrix(graph, options.laplacian), k);
  } else {
    const Eigen::VectorXd deg = safe_degrees(graph);
    const Eigen::VectorXd inv_sqrt = deg.cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd raw_deg = graph_degrees(graph);
    const Eigen::MatrixXd& w = graph.weights;
    BlockOperator op;
    if (options.laplacian == LaplacianKind::kSymmetricNormalized) {
      op = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
        Eigen::MatrixXd scaled = inv_sqrt.asDiagonal() * in;
        out.noalias() = w * scaled;
        out = in - inv_sqrt.asDiagonal() * out;
      };
    } else {
      op = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
        out.noalias() = w * in;
        out = raw_deg.asDiagonal() * in - out;
      };
    }
    pairs = lanczos_smallest(op, n, k, seed, options.lanczos);
  }
  Eigen::MatrixXd rows = pairs.vectors;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm > kNormEpsilon) rows.row(i) /= norm;
  }
  return rows;
}

std::vector<int> spectral_cluster(const SimilarityGraph& graph, int k, uint64_t seed,
                                  const SpectralOptions& options) {
  const Eigen::MatrixXd rows = spectral_embedding(graph, k, seed, options);
  return kmeans_cluster(rows, k, seed, options.kmeans).labels;
}

ClusterMap unsup_segment(const FusedFeatureMap& features, int k, uint64_t seed,
                         Extent output_resolution, const UnsupervisedOptions& options) {
  const FusedFeatureMap working = resize_features(features, options.working_resolution);
  const SimilarityGraph graph = similarity_graph(to_matrix(working));
  const std::vector<int> clusters = spectral_cluster(graph, k, seed, options.spectral);

  ChannelMap indicators(k, working.height, working.width);
  for (size_t i = 0; i < clusters.size(); ++i) {
    indicators.data[static_cast<size_t>(clusters[i]) * clusters.size() + i] = 1.0f;
  }
  RepresentativeAccumulator acc(k, features.dim);
  acc.add_attention(working, indicators, NegativePolicy::kClamp);
  const ClusterMap full = assign_labels(features, acc.finalize());
  return resize_nearest(full, output_resolution);
}

ClusterMap kmeans_segment(const FusedFeatureMap& features, int k, uint64_t seed,
                          Extent output_resolution, const KMeansOptions& options) {
  const KMeansResult result = kmeans_cluster(to_matrix(features), k, seed, options);
  ClusterMap map(features.height, features.width);
  std::copy(result.labels.begin(), result.labels.end(), map.labels.begin());
  return resize_nearest(map, output_resolution);
}

}  // namespace featseg
