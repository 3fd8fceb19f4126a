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

#include "featseg/tensor_store.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "featseg/error.h"

namespace featseg {
namespace {

constexpr size_t kFixedHeaderBytes = 6;
constexpr float kMaxExactLabel = 16777216.0f;  // 2^24

void put_u32(std::vector<char>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(const unsigned char* p) {
  return uint32_t{p[0]} | (uint32_t{p[1]} << 8) | (uint32_t{p[2]} << 16) |
         (uint32_t{p[3]} << 24);
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TensorFormatError(TensorFormatErrorKind::kIo,
                            "cannot open " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw TensorFormatError(TensorFormatErrorKind::kIo,
                            "read failed for " + path.string());
  }
  return bytes;
}

struct Header {
  std::vector<uint32_t> dims;
  size_t payload_offset = 0;
};

// Validates magic, dtype, rank and dims; does not look at the payload.
Header parse_header_fields(std::span<const unsigned char> bytes,
                           const std::filesystem::path& path) {
  const std::string where = " (" + path.string() + ")";
  if (bytes.size() < 4 ||
      !std::equal(std::begin(kTensorMagic), std::end(kTensorMagic), bytes.begin(),
                  [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw TensorFormatError(TensorFormatErrorKind::kBadMagic,
                            "expected magic \"MDT1\"" + where);
  }
  if (bytes.size() < kFixedHeaderBytes) {
    throw TensorFormatError(TensorFormatErrorKind::kTruncatedHeader,
                            "file ends inside the fixed header" + where);
  }
  if (bytes[4] != kDtypeFloat32) {
    throw TensorFormatError(
        TensorFormatErrorKind::kUnknownDtype,
        "dtype code " + std::to_string(bytes[4]) + " is not supported" + where);
  }
  const int ndim = bytes[5];
  if (ndim < 1 || ndim > kMaxTensorRank) {
    throw TensorFormatError(TensorFormatErrorKind::kBadRank,
                            "ndim " + std::to_string(ndim) +
                                " outside [1, 4]" + where);
  }
  const size_t header_bytes = kFixedHeaderBytes + 4 * static_cast<size_t>(ndim);
  if (bytes.size() < header_bytes) {
    throw TensorFormatError(TensorFormatErrorKind::kTruncatedHeader,
                            "file ends inside the dims block" + where);
  }
  Header header;
  header.payload_offset = header_bytes;
  for (int i = 0; i < ndim; ++i) {
    const uint32_t d = get_u32(bytes.data() + kFixedHeaderBytes + 4 * i);
    if (d == 0) {
      throw TensorFormatError(TensorFormatErrorKind::kZeroDim,
                              "dim " + std::to_string(i) + " is zero" + where);
    }
    header.dims.push_back(d);
  }
  return header;
}

void check_payload_size(const Header& header, uint64_t file_size,
                        const std::filesystem::path& path) {
  // Saturating product; absurd dims read as a truncated payload.
  uint64_t expected = 4;
  for (uint32_t d : header.dims) {
    expected = expected > UINT64_MAX / d ? UINT64_MAX : expected * d;
  }
  const uint64_t actual = file_size - header.payload_offset;
  if (actual == expected) return;
  throw TensorFormatError(actual < expected
                              ? TensorFormatErrorKind::kTruncatedPayload
                              : TensorFormatErrorKind::kTrailingBytes,
                          "expected " + std::to_string(expected) +
                              " payload bytes, found " + std::to_string(actual) +
                              " (" + path.string() + ")");
}

}  // namespace

const char* to_string(TensorFormatErrorKind kind) {
  switch (kind) {
    case TensorFormatErrorKind::kIo: return "io error";
    case TensorFormatErrorKind::kBadMagic: return "bad magic";
    case TensorFormatErrorKind::kUnknownDtype: return "unknown dtype";
    case TensorFormatErrorKind::kBadRank: return "bad rank";
    case TensorFormatErrorKind::kZeroDim: return "zero dim";
    case TensorFormatErrorKind::kTruncatedHeader: return "truncated header";
    case TensorFormatErrorKind::kTruncatedPayload: return "truncated payload";
    case TensorFormatErrorKind::kTrailingBytes: return "trailing bytes";
    case TensorFormatErrorKind::kNonFiniteValue: return "non-finite value";
    case TensorFormatErrorKind::kShapeMismatch: return "shape mismatch";
  }
  return "tensor format error";
}

uint64_t element_count(std::span<const uint32_t> dims) {
  uint64_t n = 1;
  for (uint32_t d : dims) n *= d;
  return n;
}

uint64_t Tensor::element_count() const { return featseg::element_count(dims); }

void write_tensor(const std::filesystem::path& path,
                  std::span<const uint32_t> dims,
                  std::span<const float> values) {
  if (dims.empty() || dims.size() > static_cast<size_t>(kMaxTensorRank)) {
    throw TensorFormatError(TensorFormatErrorKind::kBadRank,
                            "ndim " + std::to_string(dims.size()) +
                                " outside [1, 4] (" + path.string() + ")");
  }
  for (size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) {
      throw TensorFormatError(TensorFormatErrorKind::kZeroDim,
                              "dim " + std::to_string(i) + " is zero (" +
                                  path.string() + ")");
    }
  }
  if (element_count(dims) != values.size()) {
    throw TensorFormatError(TensorFormatErrorKind::kShapeMismatch,
                            std::to_string(values.size()) +
                                " values for dims of product " +
                                std::to_string(element_count(dims)) + " (" +
                                path.string() + ")");
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw NonFiniteValueError(i, path.string());
  }

  std::vector<char> bytes;
  bytes.reserve(kFixedHeaderBytes + 4 * dims.size() + 4 * values.size());
  bytes.insert(bytes.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
  bytes.push_back(static_cast<char>(kDtypeFloat32));
  bytes.push_back(static_cast<char>(dims.size()));
  for (uint32_t d : dims) put_u32(bytes, d);
  for (float v : values) put_u32(bytes, std::bit_cast<uint32_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw TensorFormatError(TensorFormatErrorKind::kIo,
                            "cannot open " + path.string() + " for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw TensorFormatError(TensorFormatErrorKind::kIo,
                            "write failed for " + path.string());
  }
}

Tensor read_tensor(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = slurp(path);
  Header header = parse_header_fields(bytes, path);
  check_payload_size(header, bytes.size(), path);
  Tensor tensor;
  tensor.dims = std::move(header.dims);
  const uint64_t n = tensor.element_count();
  tensor.values.resize(n);
  const unsigned char* p = bytes.data() + header.payload_offset;
  for (uint64_t i = 0; i < n; ++i) {
    tensor.values[i] = std::bit_cast<float>(get_u32(p + 4 * i));
  }
  return tensor;
}

std::vector<uint32_t> read_tensor_dims(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TensorFormatError(TensorFormatErrorKind::kIo,
                            "cannot open " + path.string());
  }
  std::vector<unsigned char> head(kFixedHeaderBytes + 4 * kMaxTensorRank);
  in.read(reinterpret_cast<char*>(head.data()),
          static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<size_t>(in.gcount()));
  std::error_code ec;
  const uint64_t file_size = std::filesystem::file_size(path, ec);
  if (ec) {
    throw TensorFormatError(TensorFormatErrorKind::kIo,
                            "cannot stat " + path.string());
  }
  Header header = parse_header_fields(head, path);
  check_payload_size(header, file_size, path);
  return header.dims;
}

ChannelMap tensor_to_channel_map(const Tensor& tensor) {
  ChannelMap map;
  if (tensor.dims.size() == 2) {
    map.channels = 1;
    map.height = static_cast<int>(tensor.dims[0]);
    map.width = static_cast<int>(tensor.dims[1]);
  } else if (tensor.dims.size() == 3) {
    map.channels = static_cast<int>(tensor.dims[0]);
    map.height = static_cast<int>(tensor.dims[1]);
    map.width = static_cast<int>(tensor.dims[2]);
  } else {
    throw TensorFormatError(TensorFormatErrorKind::kShapeMismatch,
                            "expected a rank-2 or rank-3 tensor, got rank " +
                                std::to_string(tensor.dims.size()));
  }
  map.data = tensor.values;
  return map;
}

std::vector<ChannelMap> tensor_to_channel_groups(const Tensor& tensor) {
  if (tensor.dims.size() == 3) return {tensor_to_channel_map(tensor)};
  if (tensor.dims.size() != 4) {
    throw TensorFormatError(TensorFormatErrorKind::kShapeMismatch,
                            "expected a rank-3 or rank-4 tensor, got rank " +
                                std::to_string(tensor.dims.size()));
  }
  const int groups = static_cast<int>(tensor.dims[0]);
  std::vector<ChannelMap> out;
  out.reserve(groups);
  const size_t group_size = tensor.values.size() / groups;
  for (int g = 0; g < groups; ++g) {
    ChannelMap map(static_cast<int>(tensor.dims[1]), static_cast<int>(tensor.dims[2]),
                   static_cast<int>(tensor.dims[3]));
    std::copy_n(tensor.values.begin() + g * group_size, group_size, map.data.begin());
    out.push_back(std::move(map));
  }
  return out;
}

void write_channel_map(const std::filesystem::path& path, const ChannelMap& map) {
  const uint32_t dims[3] = {static_cast<uint32_t>(map.channels),
                            static_cast<uint32_t>(map.height),
                            static_cast<uint32_t>(map.width)};
  write_tensor(path, dims, map.data);
}

void write_label_map(const std::filesystem::path& path, const LabelMap& labels) {
  std::vector<float> values(labels.labels.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const int32_t v = labels.labels[i];
    if (v < 0 || v > (1 << 24)) {
      throw InputError("label " + std::to_string(v) + " at index " +
                       std::to_string(i) + " cannot be stored exactly (" +
                       path.string() + ")");
    }
    values[i] = static_cast<float>(v);
  }
  const uint32_t dims[2] = {static_cast<uint32_t>(labels.height),
                            static_cast<uint32_t>(labels.width)};
  write_tensor(path, dims, values);
}

LabelMap read_label_map(const std::filesystem::path& path) {
  const Tensor tensor = read_tensor(path);
  if (tensor.dims.size() != 2) {
    throw TensorFormatError(TensorFormatErrorKind::kShapeMismatch,
                            "label map must be rank 2 (" + path.string() + ")");
  }
  LabelMap labels(static_cast<int>(tensor.dims[0]), static_cast<int>(tensor.dims[1]));
  for (size_t i = 0; i < tensor.values.size(); ++i) {
    const float v = tensor.values[i];
    if (!(v >= 0.0f && v <= kMaxExactLabel) || v != std::floor(v)) {
      throw InputError("label value at index " + std::to_string(i) +
                       " is not an integer in [0, 2^24] (" + path.string() + ")");
    }
    labels.labels[i] = static_cast<int32_t>(v);
  }
  return labels;
}

ClassVocabulary::ClassVocabulary(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.empty()) throw InputError("class vocabulary is empty");
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw InputError("class vocabulary entry " + std::to_string(i) + " is empty");
    }
    if (!seen.insert(names_[i]).second) {
      throw InputError("class vocabulary lists \"" + names_[i] + "\" twice");
    }
  }
}

ClassVocabulary ClassVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open vocabulary " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    names.push_back(line);
  }
  // A final newline is not an extra empty class.
  while (!names.empty() && names.back().empty()) names.pop_back();
  try {
    return ClassVocabulary(std::move(names));
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " (" + path.string() + ")");
  }
}

void ClassVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write vocabulary " + path.string());
  for (const auto& name : names_) out << name << '\n';
}

int ClassVocabulary::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace featseg
