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

#include "featseg/fusion.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "featseg/error.h"

namespace featseg {
namespace {

void require_extent(Extent e, const char* what) {
  if (e.height < 1 || e.width < 1) {
    throw InputError(std::string(what) + " must be at least 1x1");
  }
}

// Source sample positions for one axis.
struct AxisWeights {
  std::vector<int> lo, hi;
  std::vector<double> frac;
};

AxisWeights axis_weights(int in, int out) {
  AxisWeights w;
  w.lo.resize(out);
  w.hi.resize(out);
  w.frac.resize(out);
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(s));
    w.lo[i] = lo;
    w.hi[i] = std::min(lo + 1, in - 1);
    w.frac[i] = s - lo;
  }
  return w;
}

}  // namespace

void resize_bilinear(std::span<const float> src, Extent from,
                     std::span<float> dst, Extent to) {
  require_extent(from, "resize source");
  require_extent(to, "resize target");
  if (src.size() != static_cast<size_t>(from.area()) ||
      dst.size() != static_cast<size_t>(to.area())) {
    throw InputError("resize buffer size does not match its extent");
  }
  if (from == to) {
    std::copy(src.begin(), src.end(), dst.begin());
    return;
  }
  const AxisWeights ys = axis_weights(from.height, to.height);
  const AxisWeights xs = axis_weights(from.width, to.width);
  for (int y = 0; y < to.height; ++y) {
    const float* top = src.data() + static_cast<size_t>(ys.lo[y]) * from.width;
    const float* bottom = src.data() + static_cast<size_t>(ys.hi[y]) * from.width;
    const double fy = ys.frac[y];
    for (int x = 0; x < to.width; ++x) {
      const double fx = xs.frac[x];
      const double t = top[xs.lo[x]] + (top[xs.hi[x]] - double{top[xs.lo[x]]}) * fx;
      const double b =
          bottom[xs.lo[x]] + (bottom[xs.hi[x]] - double{bottom[xs.lo[x]]}) * fx;
      dst[static_cast<size_t>(y) * to.width + x] = static_cast<float>(t + (b - t) * fy);
    }
  }
}

std::vector<float> resize_bilinear(std::span<const float> src, Extent from, Extent to) {
  require_extent(to, "resize target");
  std::vector<float> out(static_cast<size_t>(to.area()));
  resize_bilinear(src, from, out, to);
  return out;
}

ChannelMap resize_bilinear(const ChannelMap& map, Extent to) {
  require_extent(to, "resize target");
  ChannelMap out(map.channels, to.height, to.width);
  for (int c = 0; c < map.channels; ++c) {
    resize_bilinear({map.plane(c), static_cast<size_t>(map.plane_size())},
                    map.extent(), {out.plane(c), static_cast<size_t>(out.plane_size())},
                    to);
  }
  return out;
}

FusedFeatureMap resize_features(const FusedFeatureMap& features, Extent to) {
  require_extent(to, "resize target");
  if (features.extent() == to) return features;
  FusedFeatureMap out(to.height, to.width, features.dim);
  const int64_t n_in = features.pixels();
  const int64_t n_out = out.pixels();
  std::vector<float> plane_in(n_in), plane_out(n_out);
  for (int d = 0; d < features.dim; ++d) {
    for (int64_t i = 0; i < n_in; ++i) plane_in[i] = features.data[i * features.dim + d];
    resize_bilinear(plane_in, features.extent(), plane_out, to);
    for (int64_t i = 0; i < n_out; ++i) out.data[i * out.dim + d] = plane_out[i];
  }
  return out;
}

LabelMap resize_nearest(const LabelMap& labels, Extent to) {
  require_extent(labels.extent(), "resize source");
  require_extent(to, "resize target");
  if (labels.extent() == to) return labels;
  LabelMap out(to.height, to.width);
  auto index = [](int i, int in, int out_size) {
    const int s = static_cast<int>(std::floor((i + 0.5) * in / out_size));
    return std::clamp(s, 0, in - 1);
  };
  for (int y = 0; y < to.height; ++y) {
    const int sy = index(y, labels.height, to.height);
    for (int x = 0; x < to.width; ++x) {
      out.at(y, x) = labels.at(sy, index(x, labels.width, to.width));
    }
  }
  return out;
}

FusedFeatureMap fuse_features(const LayerFeatureSet& layers, Extent target) {
  if (layers.empty()) throw InputError("fuse_features needs at least one layer");
  require_extent(target, "fusion target");
  int dim = 0;
  for (const auto& layer : layers) {
    if (layer.channels < 1) throw InputError("feature layer without channels");
    dim += layer.channels;
  }
  FusedFeatureMap fused(target.height, target.width, dim);
  const int64_t n = fused.pixels();
  std::vector<float> plane(n);
  int offset = 0;
  for (const auto& layer : layers) {
    for (int c = 0; c < layer.channels; ++c) {
      resize_bilinear({layer.plane(c), static_cast<size_t>(layer.plane_size())},
                      layer.extent(), plane, target);
      for (int64_t i = 0; i < n; ++i) fused.data[i * dim + offset + c] = plane[i];
    }
    offset += layer.channels;
  }
  return fused;
}

ChannelMap fuse_attention(const AttentionLogitSet& attention, Extent target,
                          const std::set<int>& selected_sizes) {
  if (selected_sizes.empty()) throw InputError("no attention sizes selected");
  require_extent(target, "fusion target");
  ChannelMap sum(attention.num_classes, target.height, target.width);
  std::vector<double> acc(sum.data.size(), 0.0);
  int used = 0;
  std::vector<float> plane(static_cast<size_t>(target.area()));
  for (const auto& map : attention.maps) {
    if (!selected_sizes.contains(map.height)) continue;
    if (map.channels != attention.num_classes) {
      throw InputError("attention map has " + std::to_string(map.channels) +
                       " classes, expected " + std::to_string(attention.num_classes));
    }
    for (int c = 0; c < map.channels; ++c) {
      resize_bilinear({map.plane(c), static_cast<size_t>(map.plane_size())},
                      map.extent(), plane, target);
      double* dst = acc.data() + c * sum.plane_size();
      for (size_t i = 0; i < plane.size(); ++i) dst[i] += plane[i];
    }
    ++used;
  }
  if (used == 0 && attention.num_classes > 0) {
    throw InputError("no attention map at the selected sizes");
  }
  for (size_t i = 0; i < acc.size(); ++i) {
    sum.data[i] = static_cast<float>(acc[i] / used);
  }
  return sum;
}

}  // namespace featseg
