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

#ifndef FEATSEG_PIPELINE_H_
#define FEATSEG_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>

#include "featseg/assign.h"
#include "featseg/eval.h"
#include "featseg/fusion.h"
#include "featseg/manifest.h"
#include "featseg/spectral.h"
#include "featseg/synth.h"

namespace featseg {

enum class RunMode { kSegment, kUnsup, kKMeans, kEval, kSynth };
enum class MatchGranularity { kImage, kDataset };
enum class RepresentativeSource {
  kAttention,          // attention-weighted means
  kGroundTruthImage,   // class means of each image's own ground truth
  kGroundTruthPooled,  // class means pooled over every labelled image
};

RunMode parse_mode(const std::string& s);
const char* to_string(RunMode mode);
NegativePolicy parse_negative_policy(const std::string& s);
const char* to_string(NegativePolicy policy);
MatchGranularity parse_match(const std::string& s);
const char* to_string(MatchGranularity match);
RepresentativeSource parse_representatives(const std::string& s);
const char* to_string(RepresentativeSource source);
MatchCost parse_match_cost(const std::string& s);
const char* to_string(MatchCost cost);
LaplacianKind parse_laplacian(const std::string& s);
const char* to_string(LaplacianKind kind);

// Parses "8,16,32".
std::set<int> parse_size_list(const std::string& s);

struct RunConfig {
  RunMode mode = RunMode::kSegment;
  std::filesystem::path manifest;
  std::filesystem::path vocabulary;
  std::filesystem::path out_dir;
  std::set<int> feature_sizes = kDefaultFeatureSizes;
  std::set<int> attention_sizes = kDefaultAttentionSizes;
  std::optional<int> k;
  uint64_t seed = 0;
  MatchGranularity match = MatchGranularity::kImage;
  MatchCost match_cost = MatchCost::kIntersection;
  NegativePolicy negatives = NegativePolicy::kClamp;
  RepresentativeSource representatives = RepresentativeSource::kAttention;
  bool dynamic_prompts = false;
  LaplacianKind laplacian = LaplacianKind::kSymmetricNormalized;
  Extent working_resolution = kDefaultWorkingResolution;
  int workers = 1;

  // synth mode
  SynthConfig synth;
  int synth_count = 1;

  // Throws InputError naming the first missing or inconsistent field.
  void validate() const;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNumericalError = 2;

// Runs one mode and writes its artifacts under config.out_dir:
//   labels/<image_id>.mdt  per-image label or cluster maps
//   metrics.txt            "name<TAB>value" per line (when labels exist)
//   metrics.json           the same numbers plus the cluster mappings
//   run.json               the effective configuration
// synth mode writes manifest.jsonl, vocab.txt and the fixture tensors.
// Throws InputError / NumericalError.
void run(const RunConfig& config, std::ostream& log);

// run() with errors mapped to exit codes and reported on `err`.
int run_with_status(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace featseg

#endif  // FEATSEG_PIPELINE_H_
