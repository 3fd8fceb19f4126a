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

// featseg command-line driver.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "featseg/error.h"
#include "featseg/pipeline.h"

int main(int argc, char** argv) {
  using namespace featseg;

  CLI::App app{"Training-free segmentation on frozen diffusion features"};
  std::string mode = "segment";
  std::string manifest, vocab, out;
  std::string feature_sizes = "8,16,32";
  std::string attention_sizes = "8,16";
  std::optional<int> k;
  uint64_t seed = 0;
  std::string match = "image", match_cost = "intersection";
  std::string negatives = "clamp", reps = "attention", laplacian = "sym";
  bool dynamic_prompts = false;
  int workers = 1;
  int working_size = 100;
  SynthConfig synth;
  int count = 1;
  std::string layout = "voronoi";

  app.add_option("--mode", mode, "segment | unsup | kmeans | eval | synth")->capture_default_str();
  app.add_option("--manifest", manifest, "Manifest (JSON Lines)");
  app.add_option("--vocab", vocab, "Class vocabulary, one name per line");
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--feature-sizes", feature_sizes, "Feature layer sizes to fuse")
      ->capture_default_str();
  app.add_option("--attention-sizes", attention_sizes, "Attention sizes to average")
      ->capture_default_str();
  app.add_option("--k", k, "Cluster count (unsup, kmeans)");
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--match", match, "Cluster matching: image | dataset")->capture_default_str();
  app.add_option("--match-cost", match_cost, "Matching cost: intersection | iou")
      ->capture_default_str();
  app.add_option("--neg-attention", negatives, "Negative attention: clamp | shift | raw")
      ->capture_default_str();
  app.add_option("--reps", reps, "Representatives: attention | gt-image | gt-pooled")
      ->capture_default_str();
  app.add_flag("--dynamic-prompts", dynamic_prompts,
               "Restrict classes to those present in each image's labels");
  app.add_option("--laplacian", laplacian, "Graph Laplacian: sym | unnormalized")
      ->capture_default_str();
  app.add_option("--working-size", working_size, "Square working resolution for unsup")
      ->capture_default_str();
  app.add_option("--workers", workers, "Images processed concurrently")->capture_default_str();

  auto* synth_group = app.add_option_group("synth", "Fixture generation");
  synth_group->add_option("--count", count, "Number of fixtures")->capture_default_str();
  synth_group->add_option("--height", synth.height, "Fixture height")->capture_default_str();
  synth_group->add_option("--width", synth.width, "Fixture width")->capture_default_str();
  synth_group->add_option("--classes", synth.classes, "Planted classes")->capture_default_str();
  synth_group->add_option("--dim", synth.dim, "Feature channels")->capture_default_str();
  synth_group->add_option("--noise", synth.noise_sigma, "Feature noise sigma")
      ->capture_default_str();
  synth_group->add_option("--layout", layout, "stripes | blobs | voronoi")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  RunConfig config;
  try {
    config.mode = parse_mode(mode);
    config.manifest = manifest;
    config.vocabulary = vocab;
    config.out_dir = out;
    config.feature_sizes = parse_size_list(feature_sizes);
    config.attention_sizes = parse_size_list(attention_sizes);
    config.k = k;
    config.seed = seed;
    config.match = parse_match(match);
    config.match_cost = parse_match_cost(match_cost);
    config.negatives = parse_negative_policy(negatives);
    config.representatives = parse_representatives(reps);
    config.dynamic_prompts = dynamic_prompts;
    config.laplacian = parse_laplacian(laplacian);
    config.working_resolution = {working_size, working_size};
    config.workers = workers;
    synth.layout = parse_layout(layout);
    config.synth = synth;
    config.synth_count = count;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return run_with_status(config, std::cout, std::cerr);
}
