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

#include <fstream>
#include <string>

#include "doctest.h"

#include "featseg/error.h"
#include "featseg/manifest.h"
#include "featseg/tensor_store.h"
#include "test_util.h"

namespace featseg {
namespace {

using testing::ScratchDir;

void write_zeros(const std::filesystem::path& p, std::vector<uint32_t> dims) {
  std::vector<float> values(element_count(dims), 0.0f);
  write_tensor(p, dims, values);
}

std::string load_error(const std::filesystem::path& manifest) {
  try {
    Manifest::load(manifest);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

struct Fixture {
  ScratchDir dir{"manifest"};

  Fixture() {
    std::filesystem::create_directories(dir / "t");
    write_zeros(dir / "t/f8.mdt", {4, 8, 8});
    write_zeros(dir / "t/f16.mdt", {4, 16, 16});
    write_zeros(dir / "t/a8.mdt", {3, 8, 8});
    write_zeros(dir / "t/gt.mdt", {32, 32});
  }

  std::filesystem::path manifest(const std::string& body) {
    std::ofstream(dir / "m.jsonl") << body;
    return dir / "m.jsonl";
  }
};

const char* kGood =
    R"({"image_id":"a","height":32,"width":32,"features":[{"path":"t/f8.mdt","size":[8,8]},)"
    R"({"path":"t/f16.mdt","size":[16,16]}],"attention":[{"path":"t/a8.mdt","size":[8,8]}],)"
    R"("labels":"t/gt.mdt"})";

TEST_CASE("single entry with every file present") {
  Fixture fx;
  const Manifest m = Manifest::load(fx.manifest(std::string(kGood) + "\n"));
  REQUIRE(m.entries.size() == 1);
  const ManifestEntry& e = m.entries[0];
  CHECK(e.image_id == "a");
  CHECK(e.has_attention());
  REQUIRE(e.patches.size() == 1);
  CHECK(e.patches[0].rect == Rect{0, 0, 32, 32});
  CHECK(e.patches[0].features.size() == 2);
  CHECK(e.patches[0].features[1].path == fx.dir / "t/f16.mdt");
  CHECK(e.labels == fx.dir / "t/gt.mdt");
}

TEST_CASE("save then load reproduces the entries") {
  Fixture fx;
  const Manifest m = Manifest::load(fx.manifest(kGood));
  m.save(fx.dir / "copy.jsonl");
  const Manifest again = Manifest::load(fx.dir / "copy.jsonl");
  REQUIRE(again.entries.size() == 1);
  CHECK(again.entries[0].patches[0].attention[0].path == fx.dir / "t/a8.mdt");
}

TEST_CASE("blank and comment lines are skipped") {
  Fixture fx;
  const Manifest m = Manifest::load(fx.manifest("# header\n\n" + std::string(kGood) + "\n\n"));
  CHECK(m.entries.size() == 1);
}

TEST_CASE("duplicate image_id") {
  Fixture fx;
  const std::string err = load_error(fx.manifest(std::string(kGood) + "\n" + kGood + "\n"));
  CHECK(err.find("duplicate image_id") != std::string::npos);
  CHECK(err.find(":2:") != std::string::npos);
}

TEST_CASE("declared size differs from the stored dims") {
  Fixture fx;
  const std::string err = load_error(fx.manifest(
      R"({"image_id":"b","height":32,"width":32,"features":[{"path":"t/f8.mdt","size":[8,8]}],)"
      R"("attention":[{"path":"t/a8.mdt","size":[16,16]}]})"));
  CHECK(err.find("image b") != std::string::npos);
  CHECK(err.find("declared 16x16 but stores 8x8") != std::string::npos);
}

TEST_CASE("missing file names the image") {
  Fixture fx;
  const std::string err = load_error(fx.manifest(
      R"({"image_id":"c","height":32,"width":32,"features":[{"path":"t/nope.mdt","size":[8,8]}]})"));
  CHECK(err.find("image c") != std::string::npos);
  CHECK(err.find("missing file") != std::string::npos);
}

TEST_CASE("label map must match the image size") {
  Fixture fx;
  const std::string err = load_error(fx.manifest(
      R"({"image_id":"d","height":16,"width":32,"features":[{"path":"t/f8.mdt","size":[8,8]}],)"
      R"("labels":"t/gt.mdt"})"));
  CHECK(err.find("image d") != std::string::npos);
}

TEST_CASE("patches must lie inside the image") {
  Fixture fx;
  const std::string ok = load_error(fx.manifest(
      R"({"image_id":"e","height":32,"width":48,"patches":[)"
      R"({"rect":[0,0,32,32],"features":[{"path":"t/f8.mdt","size":[8,8]}]},)"
      R"({"rect":[0,16,32,32],"features":[{"path":"t/f8.mdt","size":[8,8]}]}]})"));
  CHECK(ok.empty());
  const std::string err = load_error(fx.manifest(
      R"({"image_id":"e","height":32,"width":32,"patches":[)"
      R"({"rect":[0,16,32,32],"features":[{"path":"t/f8.mdt","size":[8,8]}]}]})"));
  CHECK(err.find("outside") != std::string::npos);
}

TEST_CASE("malformed records") {
  Fixture fx;
  CHECK(load_error(fx.manifest("{not json}")).find("invalid JSON") != std::string::npos);
  CHECK(load_error(fx.manifest(R"({"height":1,"width":1})")).find("image_id") !=
        std::string::npos);
  CHECK(load_error(fx.manifest(R"({"image_id":"x","height":0,"width":1})")).find("height") !=
        std::string::npos);
  CHECK(!load_error(fx.dir / "absent.jsonl").empty());
}

}  // namespace
}  // namespace featseg
