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

#include "featseg/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "featseg/error.h"

namespace featseg {

ConfusionMatrix::ConfusionMatrix(int rows, int cols, int ignore_label)
    : rows_(rows),
      cols_(cols),
      ignore_label_(ignore_label),
      counts_(static_cast<size_t>(std::max(rows, 0)) * std::max(cols, 0), 0) {
  if (rows < 1 || cols < 1) throw InputError("confusion matrix needs positive dimensions");
}

size_t ConfusionMatrix::index(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
    throw InputError("confusion matrix index (" + std::to_string(row) + ", " +
                     std::to_string(col) + ") out of range");
  }
  return static_cast<size_t>(row) * cols_ + col;
}

int64_t ConfusionMatrix::total() const {
  int64_t t = 0;
  for (int64_t c : counts_) t += c;
  return t;
}

int64_t ConfusionMatrix::row_sum(int row) const {
  int64_t t = 0;
  for (int c = 0; c < cols_; ++c) t += at(row, c);
  return t;
}

int64_t ConfusionMatrix::col_sum(int col) const {
  int64_t t = 0;
  for (int r = 0; r < rows_; ++r) t += at(r, col);
  return t;
}

void ConfusionMatrix::accumulate(const LabelMap& gt, const LabelMap& pred) {
  if (gt.extent() != pred.extent()) {
    throw InputError("ground truth is " + std::to_string(gt.height) + "x" +
                     std::to_string(gt.width) + " but prediction is " +
                     std::to_string(pred.height) + "x" + std::to_string(pred.width));
  }
  // Nothing is counted unless both maps are valid.
  for (size_t i = 0; i < gt.labels.size(); ++i) {
    const int g = gt.labels[i];
    if (g == ignore_label_) continue;
    if (g < 0 || g >= rows_) {
      throw InputError("ground-truth label " + std::to_string(g) + " outside [0, " +
                       std::to_string(rows_) + ")");
    }
    const int p = pred.labels[i];
    if (p < 0 || p >= cols_) {
      throw InputError("predicted label " + std::to_string(p) + " outside [0, " +
                       std::to_string(cols_) + ")");
    }
  }
  for (size_t i = 0; i < gt.labels.size(); ++i) {
    const int g = gt.labels[i];
    if (g == ignore_label_) continue;
    ++counts_[static_cast<size_t>(g) * cols_ + pred.labels[i]];
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw InputError("cannot merge confusion matrices of different shapes");
  }
  for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

IouReport miou(const ConfusionMatrix& cm) {
  if (cm.cols() < cm.rows()) {
    throw InputError("miou needs at least as many columns as classes");
  }
  IouReport report;
  report.per_class.resize(cm.rows());
  double sum = 0.0;
  for (int c = 0; c < cm.rows(); ++c) {
    const int64_t tp = cm.at(c, c);
    const int64_t denom = cm.row_sum(c) + cm.col_sum(c) - tp;
    if (denom == 0) continue;
    const double iou = static_cast<double>(tp) / static_cast<double>(denom);
    report.per_class[c] = iou;
    sum += iou;
    ++report.classes_counted;
  }
  if (report.classes_counted == 0) {
    throw InputError("every class is absent from both ground truth and prediction");
  }
  report.mean = sum / report.classes_counted;
  return report;
}

std::vector<int> AssignmentResult::col_to_row(int cols) const {
  std::vector<int> inverse(cols, -1);
  for (size_t r = 0; r < row_to_col.size(); ++r) {
    if (row_to_col[r] >= 0) inverse[row_to_col[r]] = static_cast<int>(r);
  }
  return inverse;
}

namespace {

// Shortest augmenting path Hungarian algorithm on a square matrix. On return
// the potentials satisfy u[i] + v[j] <= a(i, j), with equality on the
// matching.
struct Potentials {
  std::vector<double> u, v;
  std::vector<int> row_to_col;
};

Potentials solve_square(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based with a virtual column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Potentials out;
  out.u.assign(u.begin() + 1, u.end());
  out.v.assign(v.begin() + 1, v.end());
  out.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.row_to_col[p[j] - 1] = j - 1;
  return out;
}

// Among perfect matchings that use only tight edges (all of which are
// optimal), picks the lexicographically smallest row -> col sequence.
class TightGraphRefiner {
 public:
  TightGraphRefiner(const Eigen::MatrixXd& a, const Potentials& pot, double tol)
      : n_(static_cast<int>(a.rows())),
        tight_(static_cast<size_t>(n_) * n_, false),
        row_to_col_(pot.row_to_col),
        col_to_row_(n_, -1),
        row_fixed_(n_, false),
        col_fixed_(n_, false) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        tight_[static_cast<size_t>(i) * n_ + j] = a(i, j) - pot.u[i] - pot.v[j] <= tol;
      }
      // Matched edges are tight by construction.
      tight_[static_cast<size_t>(i) * n_ + row_to_col_[i]] = true;
      col_to_row_[row_to_col_[i]] = i;
    }
  }

  std::vector<int> run() {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (!tight(i, j) || col_fixed_[j]) continue;
        if (row_to_col_[i] == j || reroute(i, j)) {
          row_fixed_[i] = true;
          col_fixed_[j] = true;
          break;
        }
      }
    }
    return row_to_col_;
  }

 private:
  bool tight(int i, int j) const { return tight_[static_cast<size_t>(i) * n_ + j]; }

  // Moves row i onto column j, repairing the matching through an
  // alternating path among unfixed rows and columns.
  bool reroute(int i, int j) {
    const int freed_col = row_to_col_[i];
    const int displaced = col_to_row_[j];
    const std::vector<int> save_rc = row_to_col_, save_cr = col_to_row_;
    row_to_col_[i] = j;
    col_to_row_[j] = i;
    col_to_row_[freed_col] = -1;
    row_fixed_[i] = true;
    col_fixed_[j] = true;
    visited_.assign(n_, false);
    const bool ok = augment(displaced, freed_col);
    row_fixed_[i] = false;
    col_fixed_[j] = false;
    if (!ok) {
      row_to_col_ = save_rc;
      col_to_row_ = save_cr;
    }
    return ok;
  }

  bool augment(int row, int target_col) {
    for (int j = 0; j < n_; ++j) {
      if (col_fixed_[j] || visited_[j] || !tight(row, j)) continue;
      visited_[j] = true;
      if (j == target_col) {
        row_to_col_[row] = j;
        col_to_row_[j] = row;
        return true;
      }
      const int next = col_to_row_[j];
      if (next < 0 || row_fixed_[next]) continue;
      if (augment(next, target_col)) {
        row_to_col_[row] = j;
        col_to_row_[j] = row;
        return true;
      }
    }
    return false;
  }

  int n_;
  std::vector<bool> tight_;
  std::vector<int> row_to_col_;
  std::vector<int> col_to_row_;
  std::vector<bool> row_fixed_;
  std::vector<bool> col_fixed_;
  std::vector<bool> visited_;
};

}  // namespace

AssignmentResult hungarian(const Eigen::MatrixXd& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) throw InputError("empty cost matrix");
  if (!cost.allFinite()) throw NumericalError("cost matrix is not finite");
  const Eigen::Index rows = cost.rows(), cols = cost.cols();
  const Eigen::Index n = std::max(rows, cols);
  Eigen::MatrixXd square = Eigen::MatrixXd::Constant(n, n, cost.maxCoeff());
  square.topLeftCorner(rows, cols) = cost;

  const Potentials pot = solve_square(square);
  const double scale = std::max(1.0, square.cwiseAbs().maxCoeff());
  const std::vector<int> matching =
      TightGraphRefiner(square, pot, 1e-9 * scale).run();

  AssignmentResult result;
  result.row_to_col.assign(rows, -1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const int c = matching[r];
    if (c < cols) {
      result.row_to_col[r] = c;
      result.total_cost += cost(r, c);
    }
  }
  return result;
}

std::vector<int> match_clusters(const ConfusionMatrix& cm, MatchCost cost_kind) {
  Eigen::MatrixXd cost(cm.rows(), cm.cols());
  for (int g = 0; g < cm.rows(); ++g) {
    for (int c = 0; c < cm.cols(); ++c) {
      const double inter = static_cast<double>(cm.at(g, c));
      if (cost_kind == MatchCost::kIntersection) {
        cost(g, c) = -inter;
      } else {
        const double uni = static_cast<double>(cm.row_sum(g) + cm.col_sum(c)) - inter;
        cost(g, c) = uni > 0.0 ? -inter / uni : 0.0;
      }
    }
  }
  const AssignmentResult assignment = hungarian(cost);
  std::vector<int> cluster_to_class(cm.cols(), -1);
  for (int g = 0; g < cm.rows(); ++g) {
    if (assignment.row_to_col[g] >= 0) cluster_to_class[assignment.row_to_col[g]] = g;
  }
  return cluster_to_class;
}

ConfusionMatrix remap_clusters(const ConfusionMatrix& cm,
                               const std::vector<int>& cluster_to_class) {
  if (static_cast<int>(cluster_to_class.size()) != cm.cols()) {
    throw InputError("cluster mapping size differs from the cluster count");
  }
  const int sink = cm.rows();
  ConfusionMatrix out(cm.rows(), cm.rows() + 1, cm.ignore_label());
  for (int g = 0; g < cm.rows(); ++g) {
    for (int c = 0; c < cm.cols(); ++c) {
      const int target = cluster_to_class[c];
      if (target >= cm.rows()) throw InputError("cluster mapped outside the classes");
      out.add(g, target < 0 ? sink : target, cm.at(g, c));
    }
  }
  return out;
}

UnsupervisedIouReport unsupervised_miou(const ConfusionMatrix& cm, MatchCost cost) {
  UnsupervisedIouReport report;
  report.cluster_to_class = match_clusters(cm, cost);
  report.iou = miou(remap_clusters(cm, report.cluster_to_class));
  return report;
}

}  // namespace featseg
