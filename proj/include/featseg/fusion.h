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

#ifndef FEATSEG_FUSION_H_
#define FEATSEG_FUSION_H_

#include <set>
#include <span>
#include <vector>

#include "featseg/tensor.h"

namespace featseg {

// Per-layer feature maps at their native resolutions, in concatenation order.
using LayerFeatureSet = std::vector<ChannelMap>;

// Per-pixel feature vectors, pixel-major: data[(y * width + x) * dim + d].
struct FusedFeatureMap {
  int height = 0;
  int width = 0;
  int dim = 0;
  std::vector<float> data;

  FusedFeatureMap() = default;
  FusedFeatureMap(int h, int w, int d)
      : height(h), width(w), dim(d), data(static_cast<size_t>(h) * w * d, 0.0f) {}

  Extent extent() const { return {height, width}; }
  int64_t pixels() const { return int64_t{height} * width; }
  std::span<float> pixel(int64_t i) {
    return {data.data() + i * dim, static_cast<size_t>(dim)};
  }
  std::span<const float> pixel(int64_t i) const {
    return {data.data() + i * dim, static_cast<size_t>(dim)};
  }
};

// Raw (softmax-free) cross-attention logits. Every map has one channel per
// vocabulary class, in vocabulary order; several maps may share a
// resolution (different layers or heads).
struct AttentionLogitSet {
  int num_classes = 0;
  std::vector<ChannelMap> maps;
};

inline const std::set<int> kDefaultAttentionSizes = {8, 16};
inline const std::set<int> kDefaultFeatureSizes = {8, 16, 32};

// Bilinear resize of one h x w plane with half-pixel centres
// (src = (dst + 0.5) * in / out - 0.5) and edge clamping. Same-size input is
// copied unchanged.
void resize_bilinear(std::span<const float> src, Extent from,
                     std::span<float> dst, Extent to);
std::vector<float> resize_bilinear(std::span<const float> src, Extent from, Extent to);
ChannelMap resize_bilinear(const ChannelMap& map, Extent to);

// Resizes every channel of a pixel-major feature map.
FusedFeatureMap resize_features(const FusedFeatureMap& features, Extent to);

// Nearest-neighbour resize for categorical maps, same centre convention.
LabelMap resize_nearest(const LabelMap& labels, Extent to);

// Resizes each layer to `target` and concatenates channels in layer order.
FusedFeatureMap fuse_features(const LayerFeatureSet& layers, Extent target);

// Per class, the arithmetic mean over every map whose height is in
// `selected_sizes`, each resized to `target` first. Returns C x H x W.
ChannelMap fuse_attention(const AttentionLogitSet& attention, Extent target,
                          const std::set<int>& selected_sizes = kDefaultAttentionSizes);

}  // namespace featseg

#endif  // FEATSEG_FUSION_H_
