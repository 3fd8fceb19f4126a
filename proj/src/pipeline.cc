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

#include "featseg/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "featseg/error.h"
#include "featseg/tensor_store.h"

namespace featseg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Input loading

struct PatchInputs {
  Rect rect;
  FusedFeatureMap features;
  std::optional<ChannelMap> attention;  // C x h x w at the feature resolution
};

void require_finite(const std::vector<float>& values, const fs::path& path,
                    const std::string& image_id) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericalError("image " + image_id + ": non-finite value at index " +
                           std::to_string(i) + " of " + path.string());
    }
  }
}

std::string size_list(const std::set<int>& sizes) {
  std::string s;
  for (int v : sizes) s += (s.empty() ? "" : ",") + std::to_string(v);
  return s;
}

PatchInputs load_patch(const PatchRecord& patch, const RunConfig& cfg,
                       const std::string& image_id, bool with_attention,
                       int num_classes) {
  PatchInputs in;
  in.rect = patch.rect;

  LayerFeatureSet layers;
  Extent target{0, 0};
  for (const auto& ref : patch.features) {
    if (!cfg.feature_sizes.contains(ref.size.height)) continue;
    Tensor t = read_tensor(ref.path);
    require_finite(t.values, ref.path, image_id);
    layers.push_back(tensor_to_channel_map(t));
    if (ref.size.height > target.height) target = ref.size;
  }
  if (layers.empty()) {
    throw InputError("image " + image_id + ": no feature layer at sizes " +
                     size_list(cfg.feature_sizes));
  }
  in.features = fuse_features(layers, target);

  if (with_attention) {
    if (patch.attention.empty()) {
      throw InputError("image " + image_id + ": no attention files");
    }
    AttentionLogitSet attention;
    attention.num_classes = num_classes;
    for (const auto& ref : patch.attention) {
      if (!cfg.attention_sizes.contains(ref.size.height)) continue;
      Tensor t = read_tensor(ref.path);
      require_finite(t.values, ref.path, image_id);
      for (ChannelMap& m : tensor_to_channel_groups(t)) {
        if (m.channels != num_classes) {
          throw InputError("image " + image_id + ": " + ref.path.string() + " has " +
                           std::to_string(m.channels) + " classes, vocabulary has " +
                           std::to_string(num_classes));
        }
        attention.maps.push_back(std::move(m));
      }
    }
    if (attention.maps.empty()) {
      throw InputError("image " + image_id + ": no attention map at sizes " +
                       size_list(cfg.attention_sizes));
    }
    in.attention = fuse_attention(attention, target, cfg.attention_sizes);
  }
  return in;
}

LabelMap crop(const LabelMap& labels, const Rect& r) {
  LabelMap out(r.height, r.width);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) out.at(y, x) = labels.at(r.y + y, r.x + x);
  }
  return out;
}

void paste(LabelMap& dst, const LabelMap& src, const Rect& r) {
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) dst.at(r.y + y, r.x + x) = src.at(y, x);
  }
}

// Lays the fused maps of all patches onto one image-level grid at the
// feature resolution of the first patch.
FusedFeatureMap stitch(const std::vector<PatchInputs>& patches, int height, int width) {
  if (patches.size() == 1 && patches[0].rect == Rect{0, 0, height, width}) {
    return patches[0].features;
  }
  const double sy = static_cast<double>(patches[0].features.height) / patches[0].rect.height;
  const double sx = static_cast<double>(patches[0].features.width) / patches[0].rect.width;
  auto scaled = [](int v, double s) { return static_cast<int>(std::lround(v * s)); };
  const int gh = std::max(1, scaled(height, sy)), gw = std::max(1, scaled(width, sx));
  FusedFeatureMap grid(gh, gw, patches[0].features.dim);
  for (const auto& p : patches) {
    if (p.features.dim != grid.dim) throw InputError("patches disagree on feature dimension");
    const int oy = std::min(scaled(p.rect.y, sy), gh - 1);
    const int ox = std::min(scaled(p.rect.x, sx), gw - 1);
    const Extent size{std::max(1, std::min(scaled(p.rect.height, sy), gh - oy)),
                      std::max(1, std::min(scaled(p.rect.width, sx), gw - ox))};
    const FusedFeatureMap piece = resize_features(p.features, size);
    for (int y = 0; y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) {
        const auto src = piece.pixel(int64_t{y} * size.width + x);
        auto dst = grid.pixel(int64_t{oy + y} * gw + ox + x);
        std::copy(src.begin(), src.end(), dst.begin());
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Per-image work

struct ImageResult {
  LabelMap prediction;
  std::optional<LabelMap> ground_truth;
};

std::optional<LabelMap> load_ground_truth(const ManifestEntry& entry) {
  if (!entry.labels) return std::nullopt;
  return read_label_map(*entry.labels);
}

std::set<int> present_classes(const LabelMap& gt, int num_classes) {
  std::set<int> present;
  for (int v : gt.labels) {
    if (v >= 0 && v < num_classes) present.insert(v);
  }
  return present;
}

RepresentativeAccumulator ground_truth_sums(const std::vector<PatchInputs>& patches,
                                            const LabelMap& gt, int num_classes) {
  RepresentativeAccumulator acc(num_classes, patches.at(0).features.dim);
  for (const auto& p : patches) {
    acc.add_labels(p.features, resize_nearest(crop(gt, p.rect), p.features.extent()));
  }
  return acc;
}

std::vector<PatchInputs> load_patches(const ManifestEntry& entry, const RunConfig& cfg,
                                      bool with_attention, int num_classes) {
  if (entry.patches.empty()) {
    throw InputError("image " + entry.image_id + ": no feature files");
  }
  std::vector<PatchInputs> patches;
  for (const auto& patch : entry.patches) {
    patches.push_back(load_patch(patch, cfg, entry.image_id, with_attention, num_classes));
  }
  return patches;
}

LabelMap segment_entry(const ManifestEntry& entry, const RunConfig& cfg, int num_classes,
                       const std::optional<LabelMap>& gt,
                       const std::optional<RepresentativeSet>& pooled) {
  const bool use_attention = cfg.representatives == RepresentativeSource::kAttention;
  const std::vector<PatchInputs> patches =
      load_patches(entry, cfg, use_attention, num_classes);

  RepresentativeSet reps;
  try {
    if (pooled) {
      reps = *pooled;
    } else if (cfg.representatives == RepresentativeSource::kGroundTruthImage) {
      if (!gt) throw InputError("image " + entry.image_id + ": ground-truth representatives need labels");
      reps = ground_truth_sums(patches, *gt, num_classes).finalize();
    } else {
      std::optional<std::set<int>> subset;
      if (cfg.dynamic_prompts) {
        if (!gt) throw InputError("image " + entry.image_id + ": dynamic prompts need labels");
        subset = present_classes(*gt, num_classes);
        if (subset->empty()) {
          throw InputError("image " + entry.image_id + ": no vocabulary class in its labels");
        }
      }
      RepresentativeAccumulator acc(num_classes, patches[0].features.dim);
      for (const auto& p : patches) {
        acc.add_attention(p.features, *p.attention, cfg.negatives, subset);
      }
      reps = acc.finalize();
    }
  } catch (const NoActiveClassError& e) {
    throw NumericalError("image " + entry.image_id + ": " + e.what());
  }

  LabelMap out(entry.height, entry.width);
  for (const auto& p : patches) {
    const LabelMap local = assign_labels(p.features, reps);
    paste(out, resize_nearest(local, {p.rect.height, p.rect.width}), p.rect);
  }
  return out;
}

LabelMap cluster_entry(const ManifestEntry& entry, const RunConfig& cfg) {
  const std::vector<PatchInputs> patches = load_patches(entry, cfg, false, 0);
  const FusedFeatureMap features = stitch(patches, entry.height, entry.width);
  const Extent out{entry.height, entry.width};
  const int k = *cfg.k;
  if (k > features.pixels() && cfg.mode == RunMode::kKMeans) {
    throw InputError("image " + entry.image_id + ": k exceeds the pixel count");
  }
  if (cfg.mode == RunMode::kKMeans) return kmeans_segment(features, k, cfg.seed, out);
  UnsupervisedOptions options;
  options.working_resolution = cfg.working_resolution;
  options.spectral.laplacian = cfg.laplacian;
  if (k > options.working_resolution.area()) {
    throw InputError("image " + entry.image_id + ": k exceeds the working resolution");
  }
  return unsup_segment(features, k, cfg.seed, out, options);
}

// Runs fn(i) for i in [0, count) on up to `workers` threads. The exception of
// the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(size_t count, int workers, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<size_t> next{0};
  auto body = [&] {
    for (size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n == 1) {
    body();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n; ++t) threads.emplace_back(body);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Metrics

std::string metric_name(std::string s) {
  for (char& c : s) {
    if (c == ' ' || c == '\t') c = '_';
  }
  return s;
}

std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << std::fixed << v;
  return os.str();
}

struct MetricReport {
  std::vector<std::pair<std::string, std::string>> lines;
  json summary = json::object();

  void add(const std::string& name, const std::string& value) {
    lines.emplace_back(name, value);
  }

  void write(const fs::path& dir) const {
    std::ofstream txt(dir / "metrics.txt", std::ios::trunc);
    for (const auto& [name, value] : lines) txt << name << '\t' << value << '\n';
    std::ofstream js(dir / "metrics.json", std::ios::trunc);
    js << summary.dump(2) << '\n';
    if (!txt || !js) throw InputError("cannot write metrics under " + dir.string());
  }
};

std::vector<std::string> class_names(const std::optional<ClassVocabulary>& vocab, int n) {
  std::vector<std::string> names;
  for (int c = 0; c < n; ++c) {
    names.push_back(vocab && c < vocab->size() ? vocab->name(c) : "class_" + std::to_string(c));
  }
  return names;
}

void add_iou(MetricReport& report, const std::string& prefix, const IouReport& iou,
             const std::vector<std::string>& names) {
  report.add(prefix, format_value(iou.mean));
  report.summary[prefix] = iou.mean;
  json per_class = json::object();
  for (size_t c = 0; c < iou.per_class.size(); ++c) {
    if (!iou.per_class[c]) continue;
    report.add("iou/" + metric_name(names[c]), format_value(*iou.per_class[c]));
    per_class[names[c]] = *iou.per_class[c];
  }
  report.summary["per_class_iou"] = per_class;
  report.add("classes_counted", std::to_string(iou.classes_counted));
  report.summary["classes_counted"] = iou.classes_counted;
}

MetricReport supervised_metrics(const std::vector<ImageResult>& results, int num_classes,
                                 const std::optional<ClassVocabulary>& vocab,
                                 const std::vector<std::string>& ids) {
  ConfusionMatrix cm(num_classes, num_classes);
  int evaluated = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ground_truth) continue;
    try {
      cm.accumulate(*results[i].ground_truth, results[i].prediction);
    } catch (const InputError& e) {
      throw InputError("image " + ids[i] + ": " + e.what());
    }
    ++evaluated;
  }
  MetricReport report;
  report.add("images_evaluated", std::to_string(evaluated));
  report.add("pixels_evaluated", std::to_string(cm.total()));
  report.summary["images_evaluated"] = evaluated;
  report.summary["pixels_evaluated"] = cm.total();
  add_iou(report, "miou", miou(cm), class_names(vocab, num_classes));
  return report;
}

MetricReport unsupervised_metrics(const std::vector<ImageResult>& results, int num_classes,
                                  int k, const RunConfig& cfg,
                                  const std::optional<ClassVocabulary>& vocab,
                                  const std::vector<std::string>& ids) {
  ConfusionMatrix dataset(num_classes, k);
  ConfusionMatrix remapped(num_classes, num_classes + 1);
  json mappings = json::object();
  int evaluated = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ground_truth) continue;
    ConfusionMatrix cm(num_classes, k);
    try {
      cm.accumulate(*results[i].ground_truth, results[i].prediction);
    } catch (const InputError& e) {
      throw InputError("image " + ids[i] + ": " + e.what());
    }
    ++evaluated;
    if (cfg.match == MatchGranularity::kImage) {
      const std::vector<int> mapping = match_clusters(cm, cfg.match_cost);
      remapped.merge(remap_clusters(cm, mapping));
      mappings[ids[i]] = mapping;
    } else {
      dataset.merge(cm);
    }
  }
  if (cfg.match == MatchGranularity::kDataset && evaluated > 0) {
    const std::vector<int> mapping = match_clusters(dataset, cfg.match_cost);
    remapped = remap_clusters(dataset, mapping);
    mappings["dataset"] = mapping;
  }
  MetricReport report;
  report.add("images_evaluated", std::to_string(evaluated));
  report.add("pixels_evaluated", std::to_string(remapped.total()));
  report.add("match", to_string(cfg.match));
  report.summary["images_evaluated"] = evaluated;
  report.summary["pixels_evaluated"] = remapped.total();
  report.summary["match"] = to_string(cfg.match);
  report.summary["match_cost"] = to_string(cfg.match_cost);
  report.summary["cluster_to_class"] = mappings;
  add_iou(report, "unsupervised_miou", miou(remapped), class_names(vocab, num_classes));
  return report;
}

int infer_class_count(const std::vector<ImageResult>& results) {
  int max_label = -1;
  for (const auto& r : results) {
    if (!r.ground_truth) continue;
    for (int v : r.ground_truth->labels) {
      if (v != kIgnoreLabel) max_label = std::max(max_label, v);
    }
  }
  return max_label + 1;
}

bool any_ground_truth(const std::vector<ImageResult>& results) {
  return std::any_of(results.begin(), results.end(),
                     [](const ImageResult& r) { return r.ground_truth.has_value(); });
}

// ---------------------------------------------------------------------------
// Modes

json config_json(const RunConfig& cfg) {
  json j;
  j["mode"] = to_string(cfg.mode);
  j["manifest"] = cfg.manifest.generic_string();
  j["vocabulary"] = cfg.vocabulary.generic_string();
  j["feature_sizes"] = std::vector<int>(cfg.feature_sizes.begin(), cfg.feature_sizes.end());
  j["attention_sizes"] =
      std::vector<int>(cfg.attention_sizes.begin(), cfg.attention_sizes.end());
  j["k"] = cfg.k ? json(*cfg.k) : json(nullptr);
  j["seed"] = cfg.seed;
  j["match"] = to_string(cfg.match);
  j["match_cost"] = to_string(cfg.match_cost);
  j["neg_attention"] = to_string(cfg.negatives);
  j["representatives"] = to_string(cfg.representatives);
  j["dynamic_prompts"] = cfg.dynamic_prompts;
  j["laplacian"] = to_string(cfg.laplacian);
  j["working_size"] = {cfg.working_resolution.height, cfg.working_resolution.width};
  return j;
}

fs::path label_path(const fs::path& out_dir, const std::string& image_id) {
  return out_dir / "labels" / (image_id + ".mdt");
}

void check_image_ids(const Manifest& manifest) {
  for (const auto& e : manifest.entries) {
    for (char c : e.image_id) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
        throw InputError("image " + e.image_id +
                         ": image_id may only use letters, digits, '_', '-' and '.'");
      }
    }
    if (e.image_id == "." || e.image_id == "..") {
      throw InputError("image " + e.image_id + ": invalid image_id");
    }
  }
}

void run_predict(const RunConfig& cfg, std::ostream& log) {
  const Manifest manifest = Manifest::load(cfg.manifest);
  check_image_ids(manifest);
  std::optional<ClassVocabulary> vocab;
  if (!cfg.vocabulary.empty()) vocab = ClassVocabulary::load(cfg.vocabulary);
  const bool supervised = cfg.mode == RunMode::kSegment;
  const int num_classes = vocab ? vocab->size() : 0;

  fs::create_directories(cfg.out_dir / "labels");
  std::ofstream(cfg.out_dir / "run.json", std::ios::trunc) << config_json(cfg).dump(2) << '\n';

  const size_t n = manifest.entries.size();
  std::vector<ImageResult> results(n);
  std::vector<std::string> ids(n);
  for (size_t i = 0; i < n; ++i) ids[i] = manifest.entries[i].image_id;

  std::optional<RepresentativeSet> pooled;
  if (supervised && cfg.representatives == RepresentativeSource::kGroundTruthPooled) {
    std::vector<std::optional<RepresentativeAccumulator>> parts(n);
    parallel_for(n, cfg.workers, [&](size_t i) {
      const ManifestEntry& e = manifest.entries[i];
      const auto gt = load_ground_truth(e);
      if (!gt) return;
      const auto patches = load_patches(e, cfg, false, num_classes);
      parts[i] = ground_truth_sums(patches, *gt, num_classes);
    });
    std::optional<RepresentativeAccumulator> total;
    for (auto& p : parts) {
      if (!p) continue;
      if (!total) {
        total = std::move(p);
      } else {
        total->merge(*p);
      }
    }
    if (!total) throw InputError("pooled ground-truth representatives need labelled images");
    try {
      pooled = total->finalize();
    } catch (const NoActiveClassError& e) {
      throw NumericalError(std::string("pooled representatives: ") + e.what());
    }
  }

  std::mutex log_mutex;
  parallel_for(n, cfg.workers, [&](size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    ImageResult r;
    r.ground_truth = load_ground_truth(e);
    r.prediction = supervised ? segment_entry(e, cfg, num_classes, r.ground_truth, pooled)
                              : cluster_entry(e, cfg);
    write_label_map(label_path(cfg.out_dir, e.image_id), r.prediction);
    {
      std::lock_guard<std::mutex> lock(log_mutex);
      log << "wrote " << label_path(cfg.out_dir, e.image_id).string() << '\n';
    }
    results[i] = std::move(r);
  });

  if (!any_ground_truth(results)) return;
  MetricReport report;
  if (supervised) {
    report = supervised_metrics(results, num_classes, vocab, ids);
  } else {
    const int classes = vocab ? vocab->size() : infer_class_count(results);
    if (classes < 1) return;
    report = unsupervised_metrics(results, classes, *cfg.k, cfg, vocab, ids);
  }
  report.summary["mode"] = to_string(cfg.mode);
  report.write(cfg.out_dir);
  for (const auto& [name, value] : report.lines) log << name << '\t' << value << '\n';
}

void run_eval(const RunConfig& cfg, std::ostream& log) {
  const fs::path run_file = cfg.out_dir / "run.json";
  std::ifstream in(run_file);
  if (!in) throw InputError("eval needs " + run_file.string() + " from a previous run");
  json recorded;
  try {
    recorded = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("cannot parse " + run_file.string() + ": " + e.what());
  }
  const RunMode produced = parse_mode(recorded.value("mode", ""));
  if (produced != RunMode::kSegment && produced != RunMode::kUnsup &&
      produced != RunMode::kKMeans) {
    throw InputError(run_file.string() + " does not describe a prediction run");
  }

  const Manifest manifest = Manifest::load(cfg.manifest);
  check_image_ids(manifest);
  fs::path vocab_path = cfg.vocabulary;
  if (vocab_path.empty() && recorded.contains("vocabulary")) {
    vocab_path = recorded["vocabulary"].get<std::string>();
  }
  std::optional<ClassVocabulary> vocab;
  if (!vocab_path.empty()) vocab = ClassVocabulary::load(vocab_path);

  std::vector<ImageResult> results;
  std::vector<std::string> ids;
  for (const auto& e : manifest.entries) {
    if (!e.labels) continue;
    const fs::path pred = label_path(cfg.out_dir, e.image_id);
    if (!fs::is_regular_file(pred)) {
      throw InputError("image " + e.image_id + ": missing prediction " + pred.string());
    }
    ImageResult r;
    r.ground_truth = read_label_map(*e.labels);
    r.prediction = read_label_map(pred);
    if (r.prediction.extent() != r.ground_truth->extent()) {
      throw InputError("image " + e.image_id + ": prediction is " +
                       std::to_string(r.prediction.height) + "x" +
                       std::to_string(r.prediction.width) + " but ground truth is " +
                       std::to_string(r.ground_truth->height) + "x" +
                       std::to_string(r.ground_truth->width));
    }
    results.push_back(std::move(r));
    ids.push_back(e.image_id);
  }
  if (results.empty()) throw InputError("no labelled image in " + cfg.manifest.string());

  MetricReport report;
  if (produced == RunMode::kSegment) {
    if (!vocab) throw InputError("evaluating class predictions needs --vocab");
    report = supervised_metrics(results, vocab->size(), vocab, ids);
  } else {
    int k = cfg.k.value_or(0);
    if (k == 0 && recorded.contains("k") && recorded["k"].is_number_integer()) {
      k = recorded["k"].get<int>();
    }
    for (const auto& r : results) {
      for (int v : r.prediction.labels) k = std::max(k, v + 1);
    }
    const int classes = vocab ? vocab->size() : infer_class_count(results);
    if (classes < 1) throw InputError("ground truth holds no class label");
    report = unsupervised_metrics(results, classes, k, cfg, vocab, ids);
  }
  report.summary["mode"] = "eval";
  report.summary["predictions"] = to_string(produced);
  report.write(cfg.out_dir);
  for (const auto& [name, value] : report.lines) log << name << '\t' << value << '\n';
}

void run_synth(const RunConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.out_dir);
  Manifest manifest;
  manifest.base_dir = cfg.out_dir;
  for (int i = 0; i < cfg.synth_count; ++i) {
    SynthConfig sc = cfg.synth;
    sc.seed = cfg.seed + static_cast<uint64_t>(i);
    std::ostringstream id;
    id << "synth_" << std::setw(4) << std::setfill('0') << i;
    manifest.entries.push_back(write_scene(generate(sc), cfg.out_dir / "tensors", id.str()));
  }
  manifest.save(cfg.out_dir / "manifest.jsonl");
  std::vector<std::string> names;
  for (int c = 0; c < cfg.synth.classes; ++c) names.push_back("class_" + std::to_string(c));
  ClassVocabulary(names).save(cfg.out_dir / "vocab.txt");
  log << "wrote " << cfg.synth_count << " fixtures to " << cfg.out_dir.string() << '\n';
}

template <typename Enum, size_t N>
Enum parse_enum(const std::string& s, const std::pair<const char*, Enum> (&table)[N],
                const char* what) {
  std::string options;
  for (const auto& [name, value] : table) {
    if (s == name) return value;
    options += (options.empty() ? "" : ", ") + std::string(name);
  }
  throw InputError(std::string("unknown ") + what + " \"" + s + "\" (" + options + ")");
}

template <typename Enum, size_t N>
const char* enum_name(Enum v, const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::pair<const char*, RunMode> kModes[] = {
    {"segment", RunMode::kSegment}, {"unsup", RunMode::kUnsup},
    {"kmeans", RunMode::kKMeans},   {"eval", RunMode::kEval},
    {"synth", RunMode::kSynth}};
constexpr std::pair<const char*, NegativePolicy> kPolicies[] = {
    {"clamp", NegativePolicy::kClamp}, {"shift", NegativePolicy::kShift},
    {"raw", NegativePolicy::kRaw}};
constexpr std::pair<const char*, MatchGranularity> kMatches[] = {
    {"image", MatchGranularity::kImage}, {"dataset", MatchGranularity::kDataset}};
constexpr std::pair<const char*, RepresentativeSource> kSources[] = {
    {"attention", RepresentativeSource::kAttention},
    {"gt-image", RepresentativeSource::kGroundTruthImage},
    {"gt-pooled", RepresentativeSource::kGroundTruthPooled}};
constexpr std::pair<const char*, MatchCost> kCosts[] = {
    {"intersection", MatchCost::kIntersection}, {"iou", MatchCost::kIou}};
constexpr std::pair<const char*, LaplacianKind> kLaplacians[] = {
    {"sym", LaplacianKind::kSymmetricNormalized},
    {"unnormalized", LaplacianKind::kUnnormalized}};

}  // namespace

RunMode parse_mode(const std::string& s) { return parse_enum(s, kModes, "mode"); }
const char* to_string(RunMode mode) { return enum_name(mode, kModes); }
NegativePolicy parse_negative_policy(const std::string& s) {
  return parse_enum(s, kPolicies, "attention-negatives policy");
}
const char* to_string(NegativePolicy policy) { return enum_name(policy, kPolicies); }
MatchGranularity parse_match(const std::string& s) {
  return parse_enum(s, kMatches, "matching granularity");
}
const char* to_string(MatchGranularity match) { return enum_name(match, kMatches); }
RepresentativeSource parse_representatives(const std::string& s) {
  return parse_enum(s, kSources, "representative source");
}
const char* to_string(RepresentativeSource source) { return enum_name(source, kSources); }
MatchCost parse_match_cost(const std::string& s) {
  return parse_enum(s, kCosts, "matching cost");
}
const char* to_string(MatchCost cost) { return enum_name(cost, kCosts); }
LaplacianKind parse_laplacian(const std::string& s) {
  return parse_enum(s, kLaplacians, "laplacian");
}
const char* to_string(LaplacianKind kind) { return enum_name(kind, kLaplacians); }

std::set<int> parse_size_list(const std::string& s) {
  std::set<int> sizes;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw InputError("invalid size \"" + item + "\" in \"" + s + "\"");
    }
    if (used != item.size() || v < 1) {
      throw InputError("invalid size \"" + item + "\" in \"" + s + "\"");
    }
    sizes.insert(v);
  }
  if (sizes.empty()) throw InputError("empty size list");
  return sizes;
}

void RunConfig::validate() const {
  if (out_dir.empty()) throw InputError("--out is required");
  if (workers < 1) throw InputError("--workers must be at least 1");
  switch (mode) {
    case RunMode::kSynth:
      if (synth_count < 1) throw InputError("--count must be at least 1");
      return;
    case RunMode::kSegment:
      if (manifest.empty()) throw InputError("segment mode needs --manifest");
      if (vocabulary.empty()) throw InputError("segment mode needs --vocab");
      if (feature_sizes.empty()) throw InputError("no feature sizes selected");
      if (representatives == RepresentativeSource::kAttention && attention_sizes.empty()) {
        throw InputError("no attention sizes selected");
      }
      return;
    case RunMode::kUnsup:
    case RunMode::kKMeans:
      if (manifest.empty()) throw InputError(std::string(to_string(mode)) + " mode needs --manifest");
      if (!k) throw InputError(std::string(to_string(mode)) + " mode needs --k");
      if (*k < 1) throw InputError("--k must be at least 1");
      if (working_resolution.height < 1 || working_resolution.width < 1) {
        throw InputError("working resolution must be positive");
      }
      return;
    case RunMode::kEval:
      if (manifest.empty()) throw InputError("eval mode needs --manifest");
      return;
  }
}

void run(const RunConfig& config, std::ostream& log) {
  config.validate();
  switch (config.mode) {
    case RunMode::kSynth: run_synth(config, log); break;
    case RunMode::kEval: run_eval(config, log); break;
    default: run_predict(config, log); break;
  }
}

int run_with_status(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    run(config, log);
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace featseg
