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

#include "featseg/synth.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "featseg/error.h"
#include "featseg/tensor_store.h"

namespace featseg {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
}

std::vector<std::vector<double>> draw_prototypes(int classes, int dim,
                                                 std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> protos;
  while (static_cast<int>(protos.size()) < classes) {
    std::vector<double> v(dim);
    for (double& x : v) x = normal(rng);
    if (std::sqrt(dot(v, v)) < 1e-6) continue;
    normalize(v);
    // Push away from any prototype it is too close to by removing that
    // component; at most `dim` removals leave an orthogonal vector.
    for (int guard = 0; guard <= dim; ++guard) {
      const std::vector<double>* worst = nullptr;
      double worst_cos = kMaxPrototypeCosine;
      for (const auto& p : protos) {
        const double c = dot(v, p);
        if (c > worst_cos) {
          worst_cos = c;
          worst = &p;
        }
      }
      if (!worst) break;
      for (int d = 0; d < dim; ++d) v[d] -= worst_cos * (*worst)[d];
      normalize(v);
    }
    bool ok = true;
    for (const auto& p : protos) ok = ok && dot(v, p) <= kMaxPrototypeCosine;
    if (ok) protos.push_back(std::move(v));
  }
  return protos;
}

LabelMap draw_regions(const SynthConfig& cfg, std::mt19937_64& rng) {
  LabelMap regions(cfg.height, cfg.width);
  std::uniform_real_distribution<double> uy(0.0, cfg.height), ux(0.0, cfg.width);
  switch (cfg.layout) {
    case SynthLayout::kStripes:
      for (int y = 0; y < cfg.height; ++y) {
        for (int x = 0; x < cfg.width; ++x) {
          regions.at(y, x) = static_cast<int>(int64_t{x} * cfg.classes / cfg.width);
        }
      }
      break;
    case SynthLayout::kVoronoi: {
      // One site per class, on distinct pixels so every class owns its site.
      std::vector<std::pair<int, int>> sites;
      std::uniform_int_distribution<int> py(0, cfg.height - 1), px(0, cfg.width - 1);
      while (static_cast<int>(sites.size()) < cfg.classes) {
        const std::pair<int, int> s{py(rng), px(rng)};
        if (std::find(sites.begin(), sites.end(), s) == sites.end()) sites.push_back(s);
      }
      for (int y = 0; y < cfg.height; ++y) {
        for (int x = 0; x < cfg.width; ++x) {
          int best = 0;
          int64_t best_d = -1;
          for (int c = 0; c < cfg.classes; ++c) {
            const int64_t dy = y - sites[c].first, dx = x - sites[c].second;
            const int64_t d = dy * dy + dx * dx;
            if (best_d < 0 || d < best_d) {
              best_d = d;
              best = c;
            }
          }
          regions.at(y, x) = best;
        }
      }
      break;
    }
    case SynthLayout::kBlobs: {
      // Class 0 is background; later blobs paint over earlier ones.
      const double radius = 0.5 * std::min(cfg.height, cfg.width) / std::sqrt(cfg.classes);
      for (int c = 1; c < cfg.classes; ++c) {
        const double cy = uy(rng), cx = ux(rng);
        for (int y = 0; y < cfg.height; ++y) {
          for (int x = 0; x < cfg.width; ++x) {
            const double dy = y + 0.5 - cy, dx = x + 0.5 - cx;
            if (dy * dy + dx * dx <= radius * radius) regions.at(y, x) = c;
          }
        }
      }
      break;
    }
  }
  return regions;
}

void add_noise(ChannelMap& map, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> normal(0.0, sigma);
  for (float& v : map.data) v = static_cast<float>(v + normal(rng));
}

std::vector<Extent> layer_extents(const std::set<int>& sizes, Extent full) {
  std::vector<Extent> out;
  for (int s : sizes) {
    if (s >= 1 && s < full.height && s < full.width) out.push_back({s, s});
  }
  return out;
}

}  // namespace

SynthLayout parse_layout(const std::string& name) {
  if (name == "stripes") return SynthLayout::kStripes;
  if (name == "blobs") return SynthLayout::kBlobs;
  if (name == "voronoi") return SynthLayout::kVoronoi;
  throw InputError("unknown layout \"" + name + "\" (stripes, blobs, voronoi)");
}

const char* to_string(SynthLayout layout) {
  switch (layout) {
    case SynthLayout::kStripes: return "stripes";
    case SynthLayout::kBlobs: return "blobs";
    case SynthLayout::kVoronoi: return "voronoi";
  }
  return "?";
}

PlantedScene generate(const SynthConfig& cfg) {
  if (cfg.classes < 1) throw InputError("synth needs at least one class");
  if (cfg.noise_sigma < 0.0) throw InputError("noise sigma must be non-negative");
  if (cfg.height < 1 || cfg.width < 1) throw InputError("synth image must be non-empty");
  if (cfg.dim < cfg.classes) {
    throw InputError("prototype dimension must be at least the class count");
  }
  if (cfg.layout == SynthLayout::kVoronoi && int64_t{cfg.height} * cfg.width < cfg.classes) {
    throw InputError("image too small for one voronoi site per class");
  }

  std::mt19937_64 rng(cfg.seed);
  PlantedScene scene;
  scene.prototypes = draw_prototypes(cfg.classes, cfg.dim, rng);
  scene.regions = draw_regions(cfg, rng);
  const Extent full{cfg.height, cfg.width};

  ChannelMap clean_features(cfg.dim, cfg.height, cfg.width);
  ChannelMap clean_attention(cfg.classes, cfg.height, cfg.width);
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      const int c = scene.regions.at(y, x);
      for (int d = 0; d < cfg.dim; ++d) {
        clean_features.at(d, y, x) = static_cast<float>(scene.prototypes[c][d]);
      }
      clean_attention.at(c, y, x) = 1.0f;
    }
  }

  for (Extent e : layer_extents(cfg.feature_sizes, full)) {
    ChannelMap layer = resize_bilinear(clean_features, e);
    add_noise(layer, cfg.noise_sigma, rng);
    scene.layers.push_back(std::move(layer));
  }
  ChannelMap top = clean_features;
  add_noise(top, cfg.noise_sigma, rng);
  scene.layers.push_back(std::move(top));

  scene.attention.num_classes = cfg.classes;
  std::vector<Extent> att = layer_extents(cfg.attention_sizes, full);
  if (att.empty()) att.push_back(full);
  for (Extent e : att) {
    ChannelMap map = resize_bilinear(clean_attention, e);
    add_noise(map, cfg.noise_sigma, rng);
    scene.attention.maps.push_back(std::move(map));
  }
  return scene;
}

ManifestEntry write_scene(const PlantedScene& scene, const std::filesystem::path& dir,
                          const std::string& image_id) {
  std::filesystem::create_directories(dir);
  ManifestEntry entry;
  entry.image_id = image_id;
  entry.height = scene.regions.height;
  entry.width = scene.regions.width;
  PatchRecord patch;
  patch.rect = {0, 0, entry.height, entry.width};
  for (size_t i = 0; i < scene.layers.size(); ++i) {
    const ChannelMap& layer = scene.layers[i];
    const auto path = dir / (image_id + ".feat" + std::to_string(i) + ".mdt");
    write_channel_map(path, layer);
    patch.features.push_back({path, layer.extent()});
  }
  for (size_t i = 0; i < scene.attention.maps.size(); ++i) {
    const ChannelMap& map = scene.attention.maps[i];
    const auto path = dir / (image_id + ".attn" + std::to_string(i) + ".mdt");
    write_channel_map(path, map);
    patch.attention.push_back({path, map.extent()});
  }
  entry.patches.push_back(std::move(patch));
  const auto labels = dir / (image_id + ".gt.mdt");
  write_label_map(labels, scene.regions);
  entry.labels = labels;
  return entry;
}

}  // namespace featseg
