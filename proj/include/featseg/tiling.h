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

#ifndef FEATSEG_TILING_H_
#define FEATSEG_TILING_H_

#include <vector>

#include "featseg/manifest.h"

namespace featseg {

inline constexpr int kDefaultPatchSize = 512;

// Grid of patch x patch rectangles in row-major order. When a side is not a
// multiple of the patch size, the last patch on that side is anchored to
// end at the image edge and overlaps its neighbour; sides shorter than the
// patch get a single patch of the full side. Later rectangles take priority
// where they overlap.
std::vector<Rect> tile_plan(int height, int width, int patch = kDefaultPatchSize);

}  // namespace featseg

#endif  // FEATSEG_TILING_H_
