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

#ifndef FEATSEG_MANIFEST_H_
#define FEATSEG_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "featseg/tensor.h"

namespace featseg {

// A tensor file plus the spatial resolution the manifest declares for it.
struct TensorRef {
  std::filesystem::path path;
  Extent size;
};

// Rectangle in image pixels: top-left corner plus extent.
struct Rect {
  int y = 0;
  int x = 0;
  int height = 0;
  int width = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

// Features and attention captured for one model input patch.
struct PatchRecord {
  Rect rect;
  std::vector<TensorRef> features;   // each [C, h, w]
  std::vector<TensorRef> attention;  // each [C, h, w] or [L, C, h, w]
};

struct ManifestEntry {
  std::string image_id;
  int height = 0;
  int width = 0;
  std::vector<PatchRecord> patches;
  std::optional<std::filesystem::path> labels;  // [H, W]

  bool has_attention() const;
};

// JSON Lines: one JSON object per line, blank lines and lines starting with
// '#' ignored. Relative paths resolve against the manifest's directory.
//
//   {"image_id": "0001", "height": 64, "width": 64,
//    "features": [{"path": "0001.f32.mdt", "size": [32, 32]}],
//    "attention": [{"path": "0001.a16.mdt", "size": [16, 16]}],
//    "labels": "0001.gt.mdt"}
//
// Images tiled into several model inputs list them under "patches", each
// with "rect": [y, x, h, w] and its own "features"/"attention".
struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  // Parses and validates: unique ids, files present, declared sizes match
  // the stored dims, patches inside the image.
  static Manifest load(const std::filesystem::path& path);

  // Writes paths relative to the manifest directory when possible.
  void save(const std::filesystem::path& path) const;
};

}  // namespace featseg

#endif  // FEATSEG_MANIFEST_H_
