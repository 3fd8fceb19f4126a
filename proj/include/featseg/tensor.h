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

#ifndef FEATSEG_TENSOR_H_
#define FEATSEG_TENSOR_H_

#include <cstdint>
#include <vector>

namespace featseg {

struct Extent {
  int height = 0;
  int width = 0;

  int64_t area() const { return int64_t{height} * width; }
  friend bool operator==(const Extent&, const Extent&) = default;
};

// Dense channels x height x width map, innermost dimension (width)
// contiguous. Used for per-layer features and per-class attention logits.
struct ChannelMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  ChannelMap() = default;
  ChannelMap(int c, int h, int w, float fill = 0.0f)
      : channels(c), height(h), width(w),
        data(static_cast<size_t>(c) * h * w, fill) {}

  Extent extent() const { return {height, width}; }
  int64_t plane_size() const { return int64_t{height} * width; }

  float* plane(int c) { return data.data() + c * plane_size(); }
  const float* plane(int c) const { return data.data() + c * plane_size(); }

  float& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
};

// Per-pixel label image. Holds both named-class segmentations and
// anonymous cluster ids.
struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<int32_t> labels;

  LabelMap() = default;
  LabelMap(int h, int w, int32_t fill = 0)
      : height(h), width(w), labels(static_cast<size_t>(h) * w, fill) {}

  Extent extent() const { return {height, width}; }
  int32_t& at(int y, int x) { return labels[static_cast<size_t>(y) * width + x]; }
  int32_t at(int y, int x) const {
    return labels[static_cast<size_t>(y) * width + x];
  }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

using SegmentationMap = LabelMap;
using ClusterMap = LabelMap;

}  // namespace featseg

#endif  // FEATSEG_TENSOR_H_
