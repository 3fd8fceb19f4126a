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

#ifndef FEATSEG_SYNTH_H_
#define FEATSEG_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "featseg/fusion.h"
#include "featseg/manifest.h"
#include "featseg/tensor.h"

namespace featseg {

enum class SynthLayout { kStripes, kBlobs, kVoronoi };

SynthLayout parse_layout(const std::string& name);
const char* to_string(SynthLayout layout);

inline constexpr double kMaxPrototypeCosine = 0.5;

struct SynthConfig {
  uint64_t seed = 0;
  int height = 64;
  int width = 64;
  int dim = 32;       // prototype dimension = channels per feature layer
  int classes = 4;
  double noise_sigma = 0.05;
  SynthLayout layout = SynthLayout::kVoronoi;
  // Square sizes of the downsampled copies; sizes not below the image are
  // skipped. A full-resolution layer is always emitted last.
  std::set<int> feature_sizes = {8, 16, 32};
  std::set<int> attention_sizes = {8, 16, 32};
};

// Planted fixture: region map, unit prototypes (pairwise cosine at most
// kMaxPrototypeCosine), multi-resolution features and attention logits.
struct PlantedScene {
  LabelMap regions;
  std::vector<std::vector<double>> prototypes;
  LayerFeatureSet layers;
  AttentionLogitSet attention;
};

PlantedScene generate(const SynthConfig& config);

// Writes one scene's tensors under `dir` (file names prefixed by `image_id`)
// and returns its manifest entry.
ManifestEntry write_scene(const PlantedScene& scene, const std::filesystem::path& dir,
                          const std::string& image_id);

}  // namespace featseg

#endif  // FEATSEG_SYNTH_H_
