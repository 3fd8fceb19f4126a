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

#ifndef FEATSEG_EIGENSOLVER_H_
#define FEATSEG_EIGENSOLVER_H_

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace featseg {

// Eigenpairs in ascending eigenvalue order; vectors are columns.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// out = A * in for a block of column vectors; A must be symmetric.
using BlockOperator =
    std::function<void(const Eigen::MatrixXd& in, Eigen::MatrixXd& out)>;

EigenPairs dense_smallest(const Eigen::MatrixXd& matrix, int k);

struct LanczosOptions {
  // Converged when every wanted Ritz pair has ||A y - theta y|| <= tol * ||A||.
  double tolerance = 1e-10;
  // Basis size before a thick restart; 0 picks max(8k, 64).
  int max_basis = 0;
  int max_restarts = 500;
};

struct LanczosInfo {
  int matvec_blocks = 0;
  int restarts = 0;
  double max_residual = 0.0;
};

// k smallest eigenpairs of an n x n symmetric operator by block Lanczos with
// full reorthogonalisation and thick restarts. The block size is k, so
// eigenvalues of multiplicity up to k are found. The start block comes from
// `seed`. Throws NumericalError when the restart budget is exhausted.
EigenPairs lanczos_smallest(const BlockOperator& op, Eigen::Index n, int k,
                            uint64_t seed, const LanczosOptions& options = {},
                            LanczosInfo* info = nullptr);

}  // namespace featseg

#endif  // FEATSEG_EIGENSOLVER_H_
