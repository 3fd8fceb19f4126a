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

#include <random>

#include "doctest.h"

#include "featseg/error.h"
#include "featseg/eval.h"
#include "test_util.h"

namespace featseg {
namespace {

LabelMap row(std::vector<int32_t> v) {
  LabelMap l(1, static_cast<int>(v.size()));
  l.labels = std::move(v);
  return l;
}

ConfusionMatrix matrix(int rows, int cols, std::vector<int64_t> counts) {
  ConfusionMatrix cm(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) cm.add(r, c, counts[r * cols + c]);
  }
  return cm;
}

TEST_CASE("accumulate counts pixels") {
  ConfusionMatrix cm(2, 2);
  cm.accumulate(row({0, 0, 0, 0}), row({0, 0, 0, 0}));
  CHECK(cm.at(0, 0) == 4);

  ConfusionMatrix ignored(2, 2);
  ignored.accumulate(row({255, 255}), row({1, 0}));
  CHECK(ignored == ConfusionMatrix(2, 2));

  ConfusionMatrix hand(2, 2);
  hand.accumulate(row({0, 0, 1, 1}), row({0, 1, 1, 1}));
  CHECK(hand == matrix(2, 2, {1, 1, 0, 2}));
}

TEST_CASE("accumulate rejects bad input without counting") {
  ConfusionMatrix cm(2, 2);
  CHECK_THROWS_AS(cm.accumulate(row({0, 1}), row({0, 1, 1})), InputError);
  CHECK_THROWS_AS(cm.accumulate(row({0, 1}), row({0, 2})), InputError);
  CHECK_THROWS_AS(cm.accumulate(row({0, 3}), row({0, 1})), InputError);
  CHECK(cm.total() == 0);
}

TEST_CASE("accumulate is batch-associative") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> label(0, 3);
  ConfusionMatrix per_image(4, 4), batch(4, 4);
  std::vector<int32_t> all_gt, all_pred;
  for (int image = 0; image < 10; ++image) {
    std::vector<int32_t> gt(50), pred(50);
    for (int i = 0; i < 50; ++i) {
      gt[i] = label(rng) == 3 ? 255 : label(rng);
      pred[i] = label(rng);
    }
    ConfusionMatrix one(4, 4);
    one.accumulate(row(gt), row(pred));
    per_image.merge(one);
    all_gt.insert(all_gt.end(), gt.begin(), gt.end());
    all_pred.insert(all_pred.end(), pred.begin(), pred.end());
  }
  batch.accumulate(row(all_gt), row(all_pred));
  CHECK(per_image == batch);
}

TEST_CASE("miou of the hand matrix") {
  const IouReport r = miou(matrix(2, 2, {1, 1, 0, 2}));
  CHECK(*r.per_class[0] == doctest::Approx(0.5));
  CHECK(*r.per_class[1] == doctest::Approx(2.0 / 3.0));
  CHECK(r.mean == doctest::Approx(0.58333).epsilon(1e-4));
}

TEST_CASE("miou edge cases") {
  const IouReport diag = miou(matrix(3, 3, {5, 0, 0, 0, 0, 0, 0, 0, 7}));
  CHECK(diag.mean == 1.0);
  CHECK(diag.classes_counted == 2);
  CHECK_FALSE(diag.per_class[1].has_value());
  CHECK_THROWS_AS(miou(ConfusionMatrix(2, 2)), InputError);
  CHECK_THROWS_AS(miou(ConfusionMatrix(3, 2)), InputError);
  // A class only predicted still counts, with IoU 0.
  const IouReport fp = miou(matrix(2, 2, {3, 1, 0, 0}));
  CHECK(*fp.per_class[1] == 0.0);
  CHECK(fp.mean == doctest::Approx(0.375));
}

TEST_CASE("hungarian on the 3x3 example") {
  Eigen::MatrixXd c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const AssignmentResult r = hungarian(c);
  CHECK(r.row_to_col == std::vector<int>{1, 0, 2});
  CHECK(r.total_cost == 5.0);
  CHECK(testing::brute_force_assignment(c) == 5.0);
  CHECK(r.col_to_row(3) == std::vector<int>{1, 0, 2});
}

TEST_CASE("hungarian small cases") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Ones(4, 4) - Eigen::MatrixXd::Identity(4, 4);
  const AssignmentResult r = hungarian(id);
  CHECK(r.row_to_col == std::vector<int>{0, 1, 2, 3});
  CHECK(r.total_cost == 0.0);

  Eigen::MatrixXd wide(2, 3);
  wide << 5, 0, 5, 5, 5, 0;
  CHECK(hungarian(wide).row_to_col == std::vector<int>{1, 2});

  Eigen::MatrixXd tall(3, 2);
  tall << 9, 9, 0, 9, 9, 0;
  CHECK(hungarian(tall).row_to_col == std::vector<int>{-1, 0, 1});

  Eigen::MatrixXd ties = Eigen::MatrixXd::Zero(3, 3);
  CHECK(hungarian(ties).row_to_col == std::vector<int>{0, 1, 2});
}

TEST_CASE("hungarian equals exhaustive search") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_real_distribution<double> value(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd c(size(rng), size(rng));
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = value(rng);
    const AssignmentResult r = hungarian(c);
    double total = 0;
    for (int i = 0; i < c.rows(); ++i) {
      if (r.row_to_col[i] >= 0) total += c(i, r.row_to_col[i]);
    }
    CHECK(total == r.total_cost);
    CHECK(r.total_cost == doctest::Approx(testing::brute_force_assignment(c)).epsilon(1e-12));
  }
}

TEST_CASE("unsupervised miou") {
  ConfusionMatrix permuted = matrix(3, 3, {0, 4, 0, 0, 0, 6, 2, 0, 0});
  const UnsupervisedIouReport p = unsupervised_miou(permuted);
  CHECK(p.iou.mean == 1.0);
  CHECK(p.cluster_to_class == std::vector<int>{2, 0, 1});

  const UnsupervisedIouReport single = unsupervised_miou(matrix(2, 1, {5, 5}));
  CHECK(single.iou.mean == doctest::Approx(0.25));

  // Extra clusters fall into the sink and count against their class.
  const UnsupervisedIouReport extra = unsupervised_miou(matrix(2, 3, {4, 0, 2, 0, 6, 0}));
  CHECK(extra.cluster_to_class == std::vector<int>{0, 1, -1});
  CHECK(*extra.iou.per_class[0] == doctest::Approx(4.0 / 6.0));
  CHECK(*extra.iou.per_class[1] == 1.0);
}

TEST_CASE("iou matching cost") {
  // Intersection prefers the big overlap; IoU prefers the tight cluster.
  const ConfusionMatrix wide = matrix(2, 3, {15, 0, 12, 13, 19, 0});
  CHECK(match_clusters(wide, MatchCost::kIntersection) == std::vector<int>{0, 1, -1});
  CHECK(match_clusters(wide, MatchCost::kIou) == std::vector<int>{-1, 1, 0});
  const ConfusionMatrix cm = matrix(2, 2, {10, 9, 0, 100});
  const ConfusionMatrix remapped = remap_clusters(cm, {1, 0});
  CHECK(remapped.cols() == 3);
  CHECK(remapped.at(0, 1) == 10);
  CHECK(remapped.at(1, 0) == 100);
}

}  // namespace
}  // namespace featseg
