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

#include "featseg/assign.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "featseg/error.h"

namespace featseg {

int RepresentativeSet::num_active() const {
  return static_cast<int>(std::count(active.begin(), active.end(), true));
}

RepresentativeAccumulator::RepresentativeAccumulator(int num_classes, int dim)
    : num_classes_(num_classes),
      dim_(dim),
      sums_(static_cast<size_t>(num_classes) * dim, 0.0),
      totals_(num_classes, 0.0) {
  if (num_classes < 1) throw InputError("need at least one class");
  if (dim < 1) throw InputError("feature dimension must be positive");
}

void RepresentativeAccumulator::add_attention(
    const FusedFeatureMap& features, const ChannelMap& weights, NegativePolicy policy,
    const std::optional<std::set<int>>& active_subset) {
  if (features.dim != dim_) throw InputError("feature dimension mismatch");
  if (weights.channels != num_classes_) {
    throw InputError("attention has " + std::to_string(weights.channels) +
                     " classes, expected " + std::to_string(num_classes_));
  }
  if (weights.extent() != features.extent()) {
    throw InputError("attention resolution differs from feature resolution");
  }
  if (policy == NegativePolicy::kRaw) signed_totals_ = true;
  const int64_t n = features.pixels();
  for (int c = 0; c < num_classes_; ++c) {
    if (active_subset && !active_subset->contains(c)) continue;
    const float* a = weights.plane(c);
    double shift = 0.0;
    if (policy == NegativePolicy::kShift) {
      shift = *std::min_element(a, a + n);
    }
    double* sum = sums_.data() + static_cast<size_t>(c) * dim_;
    double total = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      double w = a[i];
      switch (policy) {
        case NegativePolicy::kClamp: w = std::max(w, 0.0); break;
        case NegativePolicy::kShift: w -= shift; break;
        case NegativePolicy::kRaw: break;
      }
      if (w == 0.0) continue;
      total += w;
      const float* f = features.data.data() + i * dim_;
      for (int d = 0; d < dim_; ++d) sum[d] += w * f[d];
    }
    totals_[c] += total;
  }
}

void RepresentativeAccumulator::add_labels(const FusedFeatureMap& features,
                                           const LabelMap& labels) {
  if (features.dim != dim_) throw InputError("feature dimension mismatch");
  if (labels.extent() != features.extent()) {
    throw InputError("label resolution differs from feature resolution");
  }
  const int64_t n = features.pixels();
  for (int64_t i = 0; i < n; ++i) {
    const int c = labels.labels[i];
    if (c < 0 || c >= num_classes_) continue;
    double* sum = sums_.data() + static_cast<size_t>(c) * dim_;
    const float* f = features.data.data() + i * dim_;
    for (int d = 0; d < dim_; ++d) sum[d] += f[d];
    totals_[c] += 1.0;
  }
}

void RepresentativeAccumulator::merge(const RepresentativeAccumulator& other) {
  if (other.num_classes_ != num_classes_ || other.dim_ != dim_) {
    throw InputError("cannot merge accumulators of different shapes");
  }
  for (size_t i = 0; i < sums_.size(); ++i) sums_[i] += other.sums_[i];
  for (size_t i = 0; i < totals_.size(); ++i) totals_[i] += other.totals_[i];
  signed_totals_ = signed_totals_ || other.signed_totals_;
}

RepresentativeSet RepresentativeAccumulator::finalize() const {
  RepresentativeSet reps;
  reps.dim = dim_;
  reps.vectors.resize(num_classes_);
  reps.weight_totals = totals_;
  reps.active.assign(num_classes_, false);
  for (int c = 0; c < num_classes_; ++c) {
    const double total = totals_[c];
    const bool usable = signed_totals_ ? std::abs(total) >= kMinWeightTotal
                                       : total >= kMinWeightTotal;
    if (!usable) continue;
    std::vector<double> v(sums_.begin() + static_cast<size_t>(c) * dim_,
                          sums_.begin() + static_cast<size_t>(c + 1) * dim_);
    bool finite = true;
    for (double& x : v) {
      x /= total;
      finite = finite && std::isfinite(x);
    }
    if (!finite) throw NumericalError("representative of class " + std::to_string(c) +
                                      " is not finite");
    reps.vectors[c] = std::move(v);
    reps.active[c] = true;
  }
  if (reps.num_active() == 0) {
    throw NoActiveClassError("no class has a positive total weight");
  }
  return reps;
}

RepresentativeSet representatives_from_attention(const FusedFeatureMap& features,
                                                 const ChannelMap& attention,
                                                 NegativePolicy policy) {
  RepresentativeAccumulator acc(attention.channels, features.dim);
  acc.add_attention(features, attention, policy);
  return acc.finalize();
}

RepresentativeSet representatives_from_labels(const FusedFeatureMap& features,
                                              const LabelMap& labels, int num_classes) {
  if (labels.labels.empty()) throw InputError("empty label map");
  RepresentativeAccumulator acc(num_classes, features.dim);
  acc.add_labels(features, labels);
  return acc.finalize();
}

SegmentationMap assign_labels(const FusedFeatureMap& features,
                              const RepresentativeSet& reps) {
  if (reps.dim != features.dim) {
    throw InputError("representative dimension " + std::to_string(reps.dim) +
                     " differs from feature dimension " + std::to_string(features.dim));
  }
  // Unit-normalised active representatives. A zero representative stays zero
  // and scores 0 against every pixel.
  std::vector<int> ids;
  std::vector<double> units;
  for (int c = 0; c < reps.num_classes(); ++c) {
    if (!reps.active[c]) continue;
    const auto& v = reps.vectors[c];
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    ids.push_back(c);
    for (double x : v) units.push_back(norm < kNormEpsilon ? 0.0 : x / norm);
  }
  if (ids.empty()) throw NoActiveClassError("no active representative");

  const int dim = features.dim;
  const int k = static_cast<int>(ids.size());
  SegmentationMap out(features.height, features.width);
  const int64_t n = features.pixels();
  for (int64_t i = 0; i < n; ++i) {
    const float* f = features.data.data() + i * dim;
    double norm = 0.0;
    for (int d = 0; d < dim; ++d) norm += double{f[d]} * f[d];
    norm = std::sqrt(norm);
    int best = ids[0];
    if (norm >= kNormEpsilon) {
      double best_score = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        const double* u = units.data() + static_cast<size_t>(j) * dim;
        double dot = 0.0;
        for (int d = 0; d < dim; ++d) dot += f[d] * u[d];
        const double score = dot / norm;
        if (score > best_score) {
          best_score = score;
          best = ids[j];
        }
      }
    }
    out.labels[i] = best;
  }
  return out;
}

SegmentationMap segment_image(const FusedFeatureMap& features, const ChannelMap& attention,
                              const std::optional<std::set<int>>& active_subset,
                              NegativePolicy policy) {
  if (active_subset) {
    if (active_subset->empty()) throw InputError("active class subset is empty");
    for (int c : *active_subset) {
      if (c < 0 || c >= attention.channels) {
        throw InputError("active class " + std::to_string(c) + " outside the vocabulary");
      }
    }
  }
  RepresentativeAccumulator acc(attention.channels, features.dim);
  acc.add_attention(features, attention, policy, active_subset);
  return assign_labels(features, acc.finalize());
}

}  // namespace featseg
