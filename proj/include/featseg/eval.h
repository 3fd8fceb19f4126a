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

#ifndef FEATSEG_EVAL_H_
#define FEATSEG_EVAL_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "featseg/tensor.h"

namespace featseg {

inline constexpr int kIgnoreLabel = 255;

// Rows are ground-truth classes, columns predicted classes or clusters.
class ConfusionMatrix {
 public:
  ConfusionMatrix(int rows, int cols, int ignore_label = kIgnoreLabel);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int ignore_label() const { return ignore_label_; }

  int64_t at(int row, int col) const { return counts_[index(row, col)]; }
  void add(int row, int col, int64_t count = 1) { counts_[index(row, col)] += count; }
  int64_t total() const;
  int64_t row_sum(int row) const;
  int64_t col_sum(int col) const;

  // Counts each pixel of `gt` (skipping the ignore label) against `pred`.
  // Throws InputError on a resolution mismatch or an out-of-range label.
  void accumulate(const LabelMap& gt, const LabelMap& pred);

  void merge(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  size_t index(int row, int col) const;

  int rows_;
  int cols_;
  int ignore_label_;
  std::vector<int64_t> counts_;
};

struct IouReport {
  // Empty for classes absent from both ground truth and prediction.
  std::vector<std::optional<double>> per_class;
  double mean = 0.0;
  int classes_counted = 0;
};

// IoU_c = TP / (TP + FP + FN) for each row class. Columns beyond rows()
// are predictions that match no class (they only add false negatives).
// Throws InputError if cols() < rows() or every class is empty.
IouReport miou(const ConfusionMatrix& cm);

struct AssignmentResult {
  std::vector<int> row_to_col;  // -1 for unmatched rows
  double total_cost = 0.0;      // sum over matched pairs, in row order

  // Inverse view: for each column, its row or -1.
  std::vector<int> col_to_row(int cols) const;
};

// Minimum-cost injective assignment of min(n, m) pairs. Rectangular input
// is padded with a constant equal to the largest entry. Among optimal
// assignments the lexicographically smallest row_to_col is returned.
AssignmentResult hungarian(const Eigen::MatrixXd& cost);

enum class MatchCost {
  kIntersection,  // cost = -|gt ∩ cluster|
  kIou,           // cost = -IoU(gt, cluster)
};

struct UnsupervisedIouReport {
  std::vector<int> cluster_to_class;  // -1 for unmatched clusters
  IouReport iou;
};

// Remaps cluster columns onto class columns by Hungarian matching. Result
// has rows() rows and rows() + 1 columns; the last column collects pixels of
// unmatched clusters and counts as an error for every class.
ConfusionMatrix remap_clusters(const ConfusionMatrix& cm,
                               const std::vector<int>& cluster_to_class);
std::vector<int> match_clusters(const ConfusionMatrix& cm,
                                MatchCost cost = MatchCost::kIntersection);

UnsupervisedIouReport unsupervised_miou(const ConfusionMatrix& cm,
                                        MatchCost cost = MatchCost::kIntersection);

}  // namespace featseg

#endif  // FEATSEG_EVAL_H_
