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

#include "featseg/eigensolver.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "featseg/error.h"

namespace featseg {
namespace {

void fill_random(Eigen::Ref<Eigen::MatrixXd> block, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = normal(rng);
  }
}

// Orthonormalises the columns of `block` against the first `used` columns of
// `basis` and against each other (two passes of Gram-Schmidt). Columns that
// vanish are replaced by fresh random directions while room remains.
// Returns the number of columns kept, which are moved to the front.
Eigen::Index orthonormalize(const Eigen::MatrixXd& basis, Eigen::Index used,
                            Eigen::MatrixXd& block, std::mt19937_64& rng) {
  const Eigen::Index n = block.rows();
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    if (used + kept >= n) break;
    Eigen::VectorXd v = block.col(j);
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double before = v.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (used > 0) v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
        if (kept > 0) v -= block.leftCols(kept) * (block.leftCols(kept).transpose() * v);
      }
      const double after = v.norm();
      if (after > 1e-10 * std::max(before, 1e-300) && after > 0.0) {
        block.col(kept++) = v / after;
        break;
      }
      fill_random(v, rng);
    }
  }
  return kept;
}

}  // namespace

EigenPairs dense_smallest(const Eigen::MatrixXd& matrix, int k) {
  if (matrix.rows() != matrix.cols()) throw InputError("matrix must be square");
  if (k < 1 || k > matrix.rows()) {
    throw InputError("k = " + std::to_string(k) + " outside [1, " +
                     std::to_string(matrix.rows()) + "]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("dense symmetric eigensolver failed");
  }
  return {solver.eigenvalues().head(k), solver.eigenvectors().leftCols(k)};
}

EigenPairs lanczos_smallest(const BlockOperator& op, Eigen::Index n, int k,
                            uint64_t seed, const LanczosOptions& options,
                            LanczosInfo* info) {
  if (k < 1 || k > n) {
    throw InputError("k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  LanczosInfo stats;
  std::mt19937_64 rng(seed);
  const Eigen::Index max_basis = std::min<Eigen::Index>(
      n, options.max_basis > 0 ? std::max(options.max_basis, 2 * k)
                               : std::max<Eigen::Index>(8 * k, 64));

  Eigen::MatrixXd basis(n, max_basis);    // V, orthonormal columns
  Eigen::MatrixXd applied(n, max_basis);  // A V
  Eigen::MatrixXd projected = Eigen::MatrixXd::Zero(max_basis, max_basis);  // V^T A V
  Eigen::Index used = 0;

  Eigen::MatrixXd block(n, k);
  fill_random(block, rng);
  double op_norm = 0.0;

  EigenPairs result;
  for (;;) {
    // Extend the basis with the new directions.
    const Eigen::Index room = max_basis - used;
    if (block.cols() > room) block.conservativeResize(Eigen::NoChange, room);
    const Eigen::Index added = orthonormalize(basis, used, block, rng);
    if (added > 0) {
      basis.middleCols(used, added) = block.leftCols(added);
      Eigen::MatrixXd out(n, added);
      op(basis.middleCols(used, added), out);
      ++stats.matvec_blocks;
      applied.middleCols(used, added) = out;
      projected.block(0, used, used + added, added) =
          basis.leftCols(used + added).transpose() * out;
      projected.block(used, 0, added, used) =
          projected.block(0, used, used, added).transpose();
      used += added;
    }

    // Rayleigh-Ritz on the current basis.
    Eigen::MatrixXd h = projected.topLeftCorner(used, used);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
    if (small.info() != Eigen::Success) throw NumericalError("Ritz eigensolve failed");
    const Eigen::VectorXd& theta = small.eigenvalues();
    op_norm = std::max({op_norm, std::abs(theta[0]), std::abs(theta[used - 1])});

    const Eigen::Index wanted = std::min<Eigen::Index>(k, used);
    const Eigen::MatrixXd y = small.eigenvectors().leftCols(wanted);
    Eigen::MatrixXd ritz = basis.leftCols(used) * y;
    Eigen::MatrixXd residual = applied.leftCols(used) * y;
    for (Eigen::Index j = 0; j < wanted; ++j) residual.col(j) -= theta[j] * ritz.col(j);

    const double threshold = options.tolerance * std::max(op_norm, 1e-300);
    double worst = 0.0;
    std::vector<Eigen::Index> open;
    for (Eigen::Index j = 0; j < wanted; ++j) {
      const double r = residual.col(j).norm();
      worst = std::max(worst, r);
      if (r > threshold) open.push_back(j);
    }
    stats.max_residual = worst;
    const bool exhausted = used == n;
    if ((wanted == k && open.empty()) || exhausted) {
      result.values = theta.head(k);
      result.vectors = ritz.leftCols(k);
      break;
    }

    if (max_basis < n && used + static_cast<Eigen::Index>(open.size()) > max_basis) {
      // Thick restart: keep the lowest Ritz vectors, which span the wanted
      // directions plus a buffer.
      if (++stats.restarts > options.max_restarts) {
        throw NumericalError("block Lanczos did not converge (max residual " +
                             std::to_string(worst) + ")");
      }
      const Eigen::Index keep = std::max<Eigen::Index>(k, std::min(used, max_basis / 2));
      const Eigen::MatrixXd yk = small.eigenvectors().leftCols(keep);
      Eigen::MatrixXd new_basis = basis.leftCols(used) * yk;
      Eigen::MatrixXd new_applied = applied.leftCols(used) * yk;
      basis.leftCols(keep) = new_basis;
      applied.leftCols(keep) = new_applied;
      projected.setZero();
      projected.topLeftCorner(keep, keep) = theta.head(keep).asDiagonal();
      used = keep;
    }

    // Residuals of the unconverged wanted pairs are orthogonal to the basis
    // and extend the Krylov space.
    block.resize(n, static_cast<Eigen::Index>(open.size()));
    for (size_t j = 0; j < open.size(); ++j) block.col(j) = residual.col(open[j]);
  }
  if (info) *info = stats;
  return result;
}

}  // namespace featseg
