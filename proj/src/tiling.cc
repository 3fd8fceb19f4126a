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

#include "featseg/tiling.h"

#include <algorithm>

#include "featseg/error.h"

namespace featseg {
namespace {

std::vector<int> starts(int extent, int patch) {
  std::vector<int> out;
  if (extent <= patch) return {0};
  for (int s = 0; s + patch < extent; s += patch) out.push_back(s);
  out.push_back(extent - patch);
  return out;
}

}  // namespace

std::vector<Rect> tile_plan(int height, int width, int patch) {
  if (height < 1 || width < 1) throw InputError("image must be at least 1x1");
  if (patch < 1) throw InputError("patch size must be positive");
  const int ph = std::min(patch, height), pw = std::min(patch, width);
  std::vector<Rect> rects;
  for (int y : starts(height, patch)) {
    for (int x : starts(width, patch)) rects.push_back({y, x, ph, pw});
  }
  return rects;
}

}  // namespace featseg
