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

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"

#include "featseg/tensor_store.h"
#include "test_util.h"

namespace featseg {
namespace {

namespace fs = std::filesystem;
using testing::ScratchDir;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli(const ScratchDir& dir, const std::string& args) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(FEATSEG_CLI) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

std::string metric(const fs::path& metrics, const std::string& name) {
  std::istringstream in(slurp(metrics));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(name + "\t", 0) == 0) return line.substr(name.size() + 1);
  }
  return "";
}

std::string synth(const ScratchDir& dir, const std::string& extra) {
  const Outcome o = cli(dir, "--mode synth --out " + (dir / "data").string() + " " + extra);
  REQUIRE(o.code == 0);
  return "--manifest " + (dir / "data/manifest.jsonl").string() + " --vocab " +
         (dir / "data/vocab.txt").string();
}

TEST_CASE("synth, segment, eval closed loop") {
  ScratchDir dir("cli");
  const std::string inputs = synth(dir, "--count 2 --noise 0 --seed 4");
  const std::string out = (dir / "seg").string();
  Outcome o = cli(dir, "--mode segment " + inputs + " --feature-sizes 64 --out " + out);
  REQUIRE(o.code == 0);
  CHECK(fs::exists(dir / "seg/labels/synth_0000.mdt"));
  CHECK(fs::exists(dir / "seg/run.json"));
  CHECK(metric(dir / "seg/metrics.txt", "miou") == "1.000000");

  fs::remove(dir / "seg/metrics.txt");
  o = cli(dir, "--mode eval " + inputs + " --out " + out);
  REQUIRE(o.code == 0);
  CHECK(metric(dir / "seg/metrics.txt", "miou") == "1.000000");
  CHECK(metric(dir / "seg/metrics.txt", "images_evaluated") == "2");
}

TEST_CASE("representative variants") {
  ScratchDir dir("cli");
  const std::string inputs = synth(dir, "--count 2 --noise 0 --seed 6");
  for (const std::string extra : {"--reps gt-image", "--dynamic-prompts",
                                  "--neg-attention shift", "--neg-attention raw"}) {
    const Outcome o = cli(dir, "--mode segment " + inputs + " --feature-sizes 64 " + extra +
                                   " --out " + (dir / "v").string());
    REQUIRE(o.code == 0);
    CHECK(std::stod(metric(dir / "v/metrics.txt", "miou")) >= 0.99);
  }
  // Pooling over one image equals that image's own class means.
  const std::string one = synth(dir, "--count 1 --noise 0 --seed 6");
  REQUIRE(cli(dir, "--mode segment " + one + " --feature-sizes 64 --reps gt-pooled --out " +
                       (dir / "p").string()).code == 0);
  CHECK(metric(dir / "p/metrics.txt", "miou") == "1.000000");
}

TEST_CASE("eval with mismatched resolutions fails") {
  ScratchDir dir("cli");
  const std::string inputs = synth(dir, "--count 1");
  const std::string out = (dir / "seg").string();
  REQUIRE(cli(dir, "--mode segment " + inputs + " --out " + out).code == 0);
  write_label_map(dir / "seg/labels/synth_0000.mdt", LabelMap(32, 32));
  const Outcome o = cli(dir, "--mode eval " + inputs + " --out " + out);
  CHECK(o.code == 1);
  CHECK(o.err.find("synth_0000") != std::string::npos);
  CHECK(o.err.find("32x32") != std::string::npos);
}

TEST_CASE("unsup with 27 clusters") {
  ScratchDir dir("cli");
  const std::string inputs = synth(dir, "--count 1 --seed 9");
  const Outcome o = cli(dir, "--mode unsup --k 27 --working-size 40 " + inputs + " --out " +
                                 (dir / "un").string());
  REQUIRE(o.code == 0);
  const LabelMap m = read_label_map(dir / "un/labels/synth_0000.mdt");
  CHECK(m.extent() == Extent{64, 64});
  for (int v : m.labels) CHECK((v >= 0 && v < 27));
  CHECK(!metric(dir / "un/metrics.txt", "unsupervised_miou").empty());
  CHECK(slurp(dir / "un/metrics.json").find("cluster_to_class") != std::string::npos);
}

TEST_CASE("dataset matching and kmeans") {
  ScratchDir dir("cli");
  const std::string inputs = synth(dir, "--count 2 --height 24 --width 24 --seed 2");
  Outcome o = cli(dir, "--mode kmeans --k 4 --match dataset " + inputs + " --out " +
                           (dir / "km").string());
  REQUIRE(o.code == 0);
  CHECK(metric(dir / "km/metrics.txt", "match") == "dataset");
  o = cli(dir, "--mode eval --match image " + inputs + " --out " + (dir / "km").string());
  REQUIRE(o.code == 0);
  CHECK(metric(dir / "km/metrics.txt", "match") == "image");
}

TEST_CASE("identical configs write identical artifacts") {
  ScratchDir dir("cli");
  const std::string inputs = synth(dir, "--count 2 --height 32 --width 32 --seed 5");
  for (const std::string mode : {"segment", "unsup --k 4 --working-size 32"}) {
    REQUIRE(cli(dir, "--mode " + mode + " " + inputs + " --out " + (dir / "a").string()).code == 0);
    REQUIRE(cli(dir, "--mode " + mode + " " + inputs + " --workers 2 --out " +
                         (dir / "b").string()).code == 0);
    for (const char* name : {"labels/synth_0000.mdt", "labels/synth_0001.mdt", "metrics.txt",
                             "metrics.json"}) {
      CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }
  }
}

TEST_CASE("input errors exit with 1 and name the image") {
  ScratchDir dir("cli");
  const std::string inputs = synth(dir, "--count 1 --height 16 --width 16");
  fs::remove(dir / "data/tensors/synth_0000.feat1.mdt");
  Outcome o = cli(dir, "--mode segment " + inputs + " --out " + (dir / "x").string());
  CHECK(o.code == 1);
  CHECK(o.err.find("synth_0000") != std::string::npos);

  o = cli(dir, "--mode unsup " + inputs + " --out " + (dir / "x").string());
  CHECK(o.code == 1);
  CHECK(o.err.find("--k") != std::string::npos);
  CHECK(cli(dir, "--mode paint --out x").code == 1);
  CHECK(cli(dir, "--mode segment --neg-attention soft --out x").code == 1);
  CHECK(cli(dir, "--mode segment --feature-sizes 8,x --out x").code == 1);
}

TEST_CASE("non-finite input exits with 2") {
  ScratchDir dir("cli");
  const std::string inputs = synth(dir, "--count 1 --height 16 --width 16");
  const fs::path f = dir / "data/tensors/synth_0000.feat0.mdt";
  std::string bytes = slurp(f);
  const uint32_t nan_bits = 0x7fc00000;
  std::memcpy(bytes.data() + bytes.size() - 4, &nan_bits, 4);
  std::ofstream(f, std::ios::binary | std::ios::trunc) << bytes;
  const Outcome o = cli(dir, "--mode segment " + inputs + " --out " + (dir / "x").string());
  CHECK(o.code == 2);
  CHECK(o.err.find("synth_0000") != std::string::npos);
}

}  // namespace
}  // namespace featseg
