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

#ifndef FEATSEG_ASSIGN_H_
#define FEATSEG_ASSIGN_H_

#include <optional>
#include <set>
#include <vector>

#include "featseg/fusion.h"
#include "featseg/tensor.h"

namespace featseg {

// How raw attention logits become averaging weights.
enum class NegativePolicy {
  kClamp,  // max(a, 0)
  kShift,  // a - min(a) per class map
  kRaw,    // a unchanged; totals may be negative
};

inline constexpr double kMinWeightTotal = 1e-8;
inline constexpr double kNormEpsilon = 1e-12;

// One representative feature per class. Inactive classes carry no vector
// and never receive pixels.
struct RepresentativeSet {
  int dim = 0;
  std::vector<std::vector<double>> vectors;
  std::vector<double> weight_totals;
  std::vector<bool> active;

  int num_classes() const { return static_cast<int>(active.size()); }
  int num_active() const;
};

// Accumulates weighted feature sums and weight totals per class. Feed it
// every patch of an image (or every image of a dataset) before finalizing
// to get one representative per class over all of them.
class RepresentativeAccumulator {
 public:
  RepresentativeAccumulator(int num_classes, int dim);

  // `weights` is C x H x W at the feature resolution. Classes outside
  // `active_subset` are skipped.
  void add_attention(const FusedFeatureMap& features, const ChannelMap& weights,
                     NegativePolicy policy = NegativePolicy::kClamp,
                     const std::optional<std::set<int>>& active_subset = std::nullopt);

  // Unit weight for each pixel on its labelled class. Labels outside
  // [0, num_classes) (e.g. the ignore label) contribute nothing.
  void add_labels(const FusedFeatureMap& features, const LabelMap& labels);

  void merge(const RepresentativeAccumulator& other);

  // Throws NoActiveClassError if every class total is below the threshold.
  RepresentativeSet finalize() const;

 private:
  int num_classes_;
  int dim_;
  std::vector<double> sums_;  // num_classes x dim
  std::vector<double> totals_;
  bool signed_totals_ = false;
};

RepresentativeSet representatives_from_attention(
    const FusedFeatureMap& features, const ChannelMap& attention,
    NegativePolicy policy = NegativePolicy::kClamp);

// Unweighted class means over the pixels of a ground-truth map.
RepresentativeSet representatives_from_labels(const FusedFeatureMap& features,
                                              const LabelMap& labels, int num_classes);

// Cosine-argmax over active classes; ties go to the lowest class id and a
// zero vector has cosine 0 with everything.
SegmentationMap assign_labels(const FusedFeatureMap& features,
                              const RepresentativeSet& reps);

// representatives_from_attention then assign_labels. With `active_subset`,
// only those classes may be assigned.
SegmentationMap segment_image(const FusedFeatureMap& features, const ChannelMap& attention,
                              const std::optional<std::set<int>>& active_subset = std::nullopt,
                              NegativePolicy policy = NegativePolicy::kClamp);

}  // namespace featseg

#endif  // FEATSEG_ASSIGN_H_
