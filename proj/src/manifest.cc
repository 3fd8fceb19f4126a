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

#include "featseg/manifest.h"

#include <fstream>
#include <unordered_set>

#include "json.hpp"

#include "featseg/error.h"
#include "featseg/tensor_store.h"

namespace featseg {
namespace {

using nlohmann::json;

struct LineContext {
  std::filesystem::path manifest;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(manifest.string() + ":" + std::to_string(line) + ": " + what);
  }
};

int get_positive_int(const json& obj, const char* key, const LineContext& ctx) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    ctx.fail(std::string("field \"") + key + "\" must be an integer");
  }
  const int v = obj[key].get<int>();
  if (v < 1) ctx.fail(std::string("field \"") + key + "\" must be >= 1");
  return v;
}

Extent parse_size(const json& v, const LineContext& ctx) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
      !v[1].is_number_integer() || v[0].get<int>() < 1 || v[1].get<int>() < 1) {
    ctx.fail("\"size\" must be [height, width] with positive integers");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<TensorRef> parse_refs(const json& obj, const char* key,
                                  const std::filesystem::path& base,
                                  const LineContext& ctx) {
  std::vector<TensorRef> refs;
  if (!obj.contains(key)) return refs;
  const json& list = obj[key];
  if (!list.is_array()) ctx.fail(std::string("\"") + key + "\" must be a list");
  for (const json& item : list) {
    if (!item.is_object() || !item.contains("path") || !item["path"].is_string() ||
        !item.contains("size")) {
      ctx.fail(std::string("each \"") + key + "\" item needs \"path\" and \"size\"");
    }
    refs.push_back({resolve(base, item["path"].get<std::string>()),
                    parse_size(item["size"], ctx)});
  }
  return refs;
}

PatchRecord parse_patch(const json& obj, const Rect& default_rect,
                        const std::filesystem::path& base, const LineContext& ctx) {
  PatchRecord patch;
  patch.rect = default_rect;
  if (obj.contains("rect")) {
    const json& r = obj["rect"];
    if (!r.is_array() || r.size() != 4) ctx.fail("\"rect\" must be [y, x, h, w]");
    for (const json& v : r) {
      if (!v.is_number_integer()) ctx.fail("\"rect\" entries must be integers");
    }
    patch.rect = {r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()};
  }
  patch.features = parse_refs(obj, "features", base, ctx);
  patch.attention = parse_refs(obj, "attention", base, ctx);
  return patch;
}

void check_file(const std::filesystem::path& path, const std::string& image_id) {
  if (!std::filesystem::is_regular_file(path)) {
    throw InputError("image " + image_id + ": missing file " + path.string());
  }
}

void validate_ref(const TensorRef& ref, bool attention, const std::string& image_id) {
  check_file(ref.path, image_id);
  std::vector<uint32_t> dims;
  try {
    dims = read_tensor_dims(ref.path);
  } catch (const TensorFormatError& e) {
    throw InputError("image " + image_id + ": " + e.what());
  }
  const size_t rank = dims.size();
  const bool rank_ok = attention ? (rank == 3 || rank == 4) : rank == 3;
  if (!rank_ok) {
    throw InputError("image " + image_id + ": " + ref.path.string() +
                     " has rank " + std::to_string(rank) + ", expected " +
                     (attention ? "3 or 4" : "3"));
  }
  const Extent stored{static_cast<int>(dims[rank - 2]), static_cast<int>(dims[rank - 1])};
  if (stored != ref.size) {
    throw InputError("image " + image_id + ": " + ref.path.string() +
                     " declared " + std::to_string(ref.size.height) + "x" +
                     std::to_string(ref.size.width) + " but stores " +
                     std::to_string(stored.height) + "x" +
                     std::to_string(stored.width));
  }
}

json refs_to_json(const std::vector<TensorRef>& refs, const std::filesystem::path& base) {
  json list = json::array();
  for (const auto& ref : refs) {
    list.push_back({{"path", ref.path.lexically_relative(base).empty()
                                 ? ref.path.generic_string()
                                 : ref.path.lexically_relative(base).generic_string()},
                    {"size", {ref.size.height, ref.size.width}}});
  }
  return list;
}

}  // namespace

bool ManifestEntry::has_attention() const {
  if (patches.empty()) return false;
  for (const auto& p : patches) {
    if (p.attention.empty()) return false;
  }
  return true;
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());

  Manifest manifest;
  manifest.base_dir = path.parent_path();
  std::unordered_set<std::string> ids;
  std::string line;
  LineContext ctx{path, 0};
  while (std::getline(in, line)) {
    ++ctx.line;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      ctx.fail(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) ctx.fail("record must be a JSON object");
    if (!obj.contains("image_id") || !obj["image_id"].is_string() ||
        obj["image_id"].get<std::string>().empty()) {
      ctx.fail("\"image_id\" must be a non-empty string");
    }

    ManifestEntry entry;
    entry.image_id = obj["image_id"].get<std::string>();
    if (!ids.insert(entry.image_id).second) {
      ctx.fail("duplicate image_id \"" + entry.image_id + "\"");
    }
    entry.height = get_positive_int(obj, "height", ctx);
    entry.width = get_positive_int(obj, "width", ctx);
    const Rect whole{0, 0, entry.height, entry.width};

    if (obj.contains("patches")) {
      if (obj.contains("features") || obj.contains("attention")) {
        ctx.fail("use either top-level \"features\"/\"attention\" or \"patches\"");
      }
      if (!obj["patches"].is_array() || obj["patches"].empty()) {
        ctx.fail("\"patches\" must be a non-empty list");
      }
      for (const json& p : obj["patches"]) {
        if (!p.is_object() || !p.contains("rect")) ctx.fail("each patch needs a \"rect\"");
        entry.patches.push_back(parse_patch(p, whole, manifest.base_dir, ctx));
      }
    } else if (obj.contains("features")) {
      entry.patches.push_back(parse_patch(obj, whole, manifest.base_dir, ctx));
    }
    if (obj.contains("labels")) {
      if (!obj["labels"].is_string()) ctx.fail("\"labels\" must be a path string");
      entry.labels = resolve(manifest.base_dir, obj["labels"].get<std::string>());
    }

    for (const auto& patch : entry.patches) {
      const Rect& r = patch.rect;
      if (r.height < 1 || r.width < 1 || r.y < 0 || r.x < 0 ||
          r.y + r.height > entry.height || r.x + r.width > entry.width) {
        throw InputError("image " + entry.image_id + ": patch rect lies outside the image");
      }
      if (patch.features.empty()) {
        throw InputError("image " + entry.image_id + ": patch without feature files");
      }
      for (const auto& ref : patch.features) validate_ref(ref, false, entry.image_id);
      for (const auto& ref : patch.attention) validate_ref(ref, true, entry.image_id);
    }
    if (entry.labels) {
      check_file(*entry.labels, entry.image_id);
      std::vector<uint32_t> dims;
      try {
        dims = read_tensor_dims(*entry.labels);
      } catch (const TensorFormatError& e) {
        throw InputError("image " + entry.image_id + ": " + e.what());
      }
      if (dims.size() != 2 || static_cast<int>(dims[0]) != entry.height ||
          static_cast<int>(dims[1]) != entry.width) {
        throw InputError("image " + entry.image_id + ": label map " +
                         entry.labels->string() + " does not match the image size");
      }
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void Manifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  for (const auto& entry : entries) {
    json obj;
    obj["image_id"] = entry.image_id;
    obj["height"] = entry.height;
    obj["width"] = entry.width;
    const bool single = entry.patches.size() == 1 &&
                        entry.patches[0].rect == Rect{0, 0, entry.height, entry.width};
    if (single) {
      obj["features"] = refs_to_json(entry.patches[0].features, base);
      if (!entry.patches[0].attention.empty()) {
        obj["attention"] = refs_to_json(entry.patches[0].attention, base);
      }
    } else if (!entry.patches.empty()) {
      json patches = json::array();
      for (const auto& p : entry.patches) {
        json pj;
        pj["rect"] = {p.rect.y, p.rect.x, p.rect.height, p.rect.width};
        pj["features"] = refs_to_json(p.features, base);
        if (!p.attention.empty()) pj["attention"] = refs_to_json(p.attention, base);
        patches.push_back(std::move(pj));
      }
      obj["patches"] = std::move(patches);
    }
    if (entry.labels) {
      const auto rel = entry.labels->lexically_relative(base);
      obj["labels"] = rel.empty() ? entry.labels->generic_string() : rel.generic_string();
    }
    out << obj.dump() << '\n';
  }
}

}  // namespace featseg
