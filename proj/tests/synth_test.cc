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

#include <set>

#include "doctest.h"

#include "featseg/assign.h"
#include "featseg/error.h"
#include "featseg/synth.h"
#include "featseg/tensor_store.h"
#include "featseg/tiling.h"
#include "test_util.h"

namespace featseg {
namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

TEST_CASE("prototypes respect the cosine bound") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.classes = 8;
    cfg.dim = 8;
    cfg.height = cfg.width = 16;
    const PlantedScene s = generate(cfg);
    for (int a = 0; a < 8; ++a) {
      CHECK(cosine(s.prototypes[a], s.prototypes[a]) == doctest::Approx(1.0));
      for (int b = a + 1; b < 8; ++b) {
        CHECK(cosine(s.prototypes[a], s.prototypes[b]) <= kMaxPrototypeCosine + 1e-12);
      }
    }
  }
}

TEST_CASE("layer and attention shapes") {
  SynthConfig cfg;
  const PlantedScene s = generate(cfg);
  REQUIRE(s.layers.size() == 4);
  CHECK(s.layers[0].extent() == Extent{8, 8});
  CHECK(s.layers[2].extent() == Extent{32, 32});
  CHECK(s.layers[3].extent() == Extent{64, 64});
  CHECK(s.layers[3].channels == cfg.dim);
  REQUIRE(s.attention.maps.size() == 3);
  CHECK(s.attention.maps[1].channels == cfg.classes);
  std::set<int> present(s.regions.labels.begin(), s.regions.labels.end());
  CHECK(present.size() == 4);
}

TEST_CASE("same seed gives identical scenes") {
  SynthConfig cfg;
  cfg.seed = 77;
  const PlantedScene a = generate(cfg), b = generate(cfg);
  CHECK(a.regions == b.regions);
  for (size_t i = 0; i < a.layers.size(); ++i) CHECK(a.layers[i].data == b.layers[i].data);
  for (size_t i = 0; i < a.attention.maps.size(); ++i) {
    CHECK(a.attention.maps[i].data == b.attention.maps[i].data);
  }
  cfg.seed = 78;
  CHECK(generate(cfg).layers[3].data != a.layers[3].data);
}

TEST_CASE("noiseless stripes are recovered exactly") {
  SynthConfig cfg;
  cfg.classes = 2;
  cfg.noise_sigma = 0.0;
  cfg.layout = SynthLayout::kStripes;
  const PlantedScene s = generate(cfg);
  const FusedFeatureMap f = fuse_features(s.layers, {64, 64});
  const ChannelMap att = fuse_attention(s.attention, {64, 64});
  CHECK(segment_image(f, att) == s.regions);
}

TEST_CASE("ground-truth representatives reproduce the planting") {
  for (SynthLayout layout : {SynthLayout::kStripes, SynthLayout::kBlobs, SynthLayout::kVoronoi}) {
    SynthConfig cfg;
    cfg.layout = layout;
    cfg.noise_sigma = 0.0;
    const PlantedScene s = generate(cfg);
    const FusedFeatureMap f = fuse_features({s.layers.back()}, {64, 64});
    CHECK(assign_labels(f, representatives_from_labels(f, s.regions, cfg.classes)) ==
          s.regions);
  }
}

TEST_CASE("write_scene round trip") {
  testing::ScratchDir dir("synth");
  SynthConfig cfg;
  cfg.height = 20;
  cfg.width = 24;
  const PlantedScene s = generate(cfg);
  const ManifestEntry e = write_scene(s, dir.path(), "img");
  CHECK(e.height == 20);
  CHECK(e.width == 24);
  CHECK(read_label_map(*e.labels) == s.regions);
  const auto& refs = e.patches[0].features;
  REQUIRE(refs.size() == s.layers.size());
  CHECK(tensor_to_channel_map(read_tensor(refs[1].path)).data == s.layers[1].data);
}

TEST_CASE("invalid synth configs") {
  SynthConfig cfg;
  cfg.dim = 2;
  CHECK_THROWS_AS(generate(cfg), InputError);
  CHECK_THROWS_AS(parse_layout("checker"), InputError);
  cfg = {};
  cfg.noise_sigma = -1;
  CHECK_THROWS_AS(generate(cfg), InputError);
}

TEST_CASE("tile plans") {
  CHECK(tile_plan(512, 512) == std::vector<Rect>{{0, 0, 512, 512}});
  CHECK(tile_plan(512, 1024) == std::vector<Rect>{{0, 0, 512, 512}, {0, 512, 512, 512}});
  CHECK(tile_plan(600, 900) == std::vector<Rect>{{0, 0, 512, 512},
                                                 {0, 388, 512, 512},
                                                 {88, 0, 512, 512},
                                                 {88, 388, 512, 512}});
  CHECK(tile_plan(100, 700) == std::vector<Rect>{{0, 0, 100, 512}, {0, 188, 100, 512}});
  CHECK_THROWS_AS(tile_plan(0, 5), InputError);
}

TEST_CASE("tile plans cover every pixel inside the image") {
  for (int h = 1; h < 1400; h += 137) {
    for (int w = 1; w < 1400; w += 151) {
      std::vector<int> hits(static_cast<size_t>(h) * w, 0);
      for (const Rect& r : tile_plan(h, w)) {
        REQUIRE(r.y >= 0);
        REQUIRE(r.x >= 0);
        REQUIRE(r.y + r.height <= h);
        REQUIRE(r.x + r.width <= w);
        for (int y = r.y; y < r.y + r.height; ++y) {
          for (int x = r.x; x < r.x + r.width; ++x) ++hits[static_cast<size_t>(y) * w + x];
        }
      }
      CHECK(*std::min_element(hits.begin(), hits.end()) >= 1);
    }
  }
}

}  // namespace
}  // namespace featseg
