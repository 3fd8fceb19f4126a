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

#include <cmath>
#include <random>

#include "doctest.h"

#include "featseg/eigensolver.h"
#include "featseg/error.h"
#include "featseg/spectral.h"
#include "test_util.h"

namespace featseg {
namespace {

Eigen::MatrixXd block_vectors(const std::vector<int>& blocks, int dim) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(blocks.size()), dim);
  for (size_t i = 0; i < blocks.size(); ++i) v(static_cast<Eigen::Index>(i), blocks[i]) = 1.0;
  return v;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  return testing::adjusted_rand_index(a, b) == 1.0;
}

TEST_CASE("graph of shared and orthogonal vectors") {
  const SimilarityGraph g = similarity_graph(block_vectors({0, 0, 1, 1}, 2));
  Eigen::Matrix4d expected;
  expected << 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1;
  CHECK(g.weights == expected);

  Eigen::MatrixXd same(5, 3);
  same.rowwise() = Eigen::RowVector3d(0.2, -1, 4);
  CHECK((similarity_graph(same).weights.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("graph entries are clamped pairwise cosines") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0, 1);
  Eigen::MatrixXd v(40, 6);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = normal(rng);
  const SimilarityGraph g = similarity_graph(v);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      double dot = 0, ni = 0, nj = 0;
      for (int d = 0; d < 6; ++d) {
        dot += v(i, d) * v(j, d);
        ni += v(i, d) * v(i, d);
        nj += v(j, d) * v(j, d);
      }
      const double expected = i == j ? 1.0 : std::max(0.0, dot / std::sqrt(ni * nj));
      CHECK(std::abs(g.weights(i, j) - expected) < 1e-12);
      CHECK(g.weights(i, j) == g.weights(j, i));
    }
  }
}

TEST_CASE("laplacian properties") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0, 1);
  Eigen::MatrixXd v(60, 5);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = normal(rng);
  const SimilarityGraph g = similarity_graph(v);
  const Eigen::MatrixXd un = laplacian_matrix(g, LaplacianKind::kUnnormalized);
  CHECK(un.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd sym = laplacian_matrix(g, LaplacianKind::kSymmetricNormalized);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  CHECK(es.eigenvalues().maxCoeff() <= 2.0 + 1e-8);
}

TEST_CASE("4-node block graph splits in two") {
  const SimilarityGraph g = similarity_graph(block_vectors({0, 0, 1, 1}, 2));
  CHECK(same_partition(spectral_cluster(g, 2, 0), {0, 0, 1, 1}));
  CHECK(spectral_cluster(g, 1, 0) == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("identity graph gives singletons") {
  SimilarityGraph g;
  g.weights = Eigen::MatrixXd::Identity(6, 6);
  std::vector<int> ids = spectral_cluster(g, 6, 3);
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("isolated zero-degree nodes") {
  SimilarityGraph g;
  g.weights = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::MatrixXd lap = laplacian_matrix(g, LaplacianKind::kSymmetricNormalized);
  CHECK(lap.allFinite());
}

TEST_CASE("bad inputs") {
  SimilarityGraph g;
  g.weights = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(spectral_cluster(g, 4, 0), InputError);
  g.weights(0, 1) = 0.5;
  CHECK_THROWS_AS(spectral_cluster(g, 2, 0), InputError);
}

TEST_CASE("block lanczos agrees with the dense solver") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 150 + 20 * trial;
    std::vector<int> blocks(n);
    for (int i = 0; i < n; ++i) blocks[i] = i % (2 + trial);
    Eigen::MatrixXd v = block_vectors(blocks, 2 + trial);
    std::normal_distribution<double> noise(0, 0.05);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] += noise(rng);
    const SimilarityGraph g = similarity_graph(v);
    const Eigen::MatrixXd lap = laplacian_matrix(g, LaplacianKind::kSymmetricNormalized);
    const int k = 2 + trial;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    LanczosOptions opts;
    opts.max_basis = 40;
    LanczosInfo info;
    const EigenPairs pairs = lanczos_smallest(
        [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = lap * in; }, n, k,
        trial, opts, &info);
    for (int j = 0; j < k; ++j) {
      CHECK(std::abs(pairs.values[j] - es.eigenvalues()[j]) < 1e-8);
      const Eigen::VectorXd r = lap * pairs.vectors.col(j) - pairs.values[j] * pairs.vectors.col(j);
      CHECK(r.norm() < 1e-6);
    }
  }
}

TEST_CASE("lanczos finds repeated eigenvalues") {
  // Three disconnected cliques: eigenvalue 0 with multiplicity 3.
  std::vector<int> blocks;
  for (int i = 0; i < 90; ++i) blocks.push_back(i / 30);
  const SimilarityGraph g = similarity_graph(block_vectors(blocks, 3));
  const Eigen::MatrixXd lap = laplacian_matrix(g, LaplacianKind::kSymmetricNormalized);
  const EigenPairs pairs = lanczos_smallest(
      [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = lap * in; }, 90, 3, 1);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(pairs.values[j]) < 1e-8);

  SpectralOptions opts;
  opts.solver = EigenSolverKind::kLanczos;
  CHECK(same_partition(spectral_cluster(g, 3, 0, opts), blocks));
}

TEST_CASE("dense_smallest is ascending") {
  Eigen::Matrix3d m;
  m << 3, 0, 0, 0, 1, 0, 0, 0, 2;
  const EigenPairs p = dense_smallest(m, 2);
  CHECK(p.values[0] == doctest::Approx(1));
  CHECK(p.values[1] == doctest::Approx(2));
}

TEST_CASE("unsup_segment on a planted two-block map") {
  FusedFeatureMap f(20, 20, 4);
  LabelMap truth(20, 20);
  std::mt19937_64 rng(5);
  std::normal_distribution<float> noise(0.0f, 0.05f);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      const int c = x < 8 ? 0 : 1;
      truth.at(y, x) = c;
      auto p = f.pixel(y * 20 + x);
      for (int d = 0; d < 4; ++d) p[d] = noise(rng);
      p[c] += 1.0f;
    }
  }
  UnsupervisedOptions opts;
  opts.working_resolution = {20, 20};
  const ClusterMap m = unsup_segment(f, 2, 9, {40, 40}, opts);
  CHECK(same_partition(m.labels, resize_nearest(truth, {40, 40}).labels));
  CHECK(unsup_segment(f, 2, 9, {40, 40}, opts) == m);
  for (int v : unsup_segment(f, 1, 9, {20, 20}, opts).labels) CHECK(v == 0);

  const ClusterMap km = kmeans_segment(f, 2, 9, {20, 20});
  CHECK(same_partition(km.labels, truth.labels));
}

}  // namespace
}  // namespace featseg
