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

#ifndef FEATSEG_TENSOR_STORE_H_
#define FEATSEG_TENSOR_STORE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "featseg/tensor.h"

namespace featseg {

// On-disk layout ("MDT1"):
//   bytes 0..3   magic "MDT1"
//   byte  4      dtype code (0 = IEEE-754 binary32)
//   byte  5      ndim, 1..4
//   ndim x u32   dims, little-endian
//   payload      product(dims) little-endian binary32, row-major
inline constexpr char kTensorMagic[4] = {'M', 'D', 'T', '1'};
inline constexpr uint8_t kDtypeFloat32 = 0;
inline constexpr int kMaxTensorRank = 4;

struct Tensor {
  std::vector<uint32_t> dims;
  std::vector<float> values;

  uint64_t element_count() const;
};

uint64_t element_count(std::span<const uint32_t> dims);

// Throws NonFiniteValueError on NaN/Inf, TensorFormatError on shape problems
// and kIo failures.
void write_tensor(const std::filesystem::path& path,
                  std::span<const uint32_t> dims,
                  std::span<const float> values);

Tensor read_tensor(const std::filesystem::path& path);

// Parses and validates only the header; the payload length is still checked
// against the file size.
std::vector<uint32_t> read_tensor_dims(const std::filesystem::path& path);

// Helpers for the tensor shapes the engine exchanges.

// [C, H, W] -> ChannelMap. A rank-2 [H, W] tensor is read as one channel.
ChannelMap tensor_to_channel_map(const Tensor& tensor);
// Rank 3 [C, H, W] gives one group; rank 4 [L, C, H, W] gives L groups.
std::vector<ChannelMap> tensor_to_channel_groups(const Tensor& tensor);
void write_channel_map(const std::filesystem::path& path, const ChannelMap& map);

// Label maps are stored as rank-2 [H, W] binary32 holding exact integers in
// [0, 2^24].
void write_label_map(const std::filesystem::path& path, const LabelMap& labels);
LabelMap read_label_map(const std::filesystem::path& path);

// One class name per line; the 0-based line number is the label id.
class ClassVocabulary {
 public:
  ClassVocabulary() = default;
  explicit ClassVocabulary(std::vector<std::string> names);

  static ClassVocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  // -1 when absent.
  int index_of(const std::string& name) const;

 private:
  std::vector<std::string> names_;
};

}  // namespace featseg

#endif  // FEATSEG_TENSOR_STORE_H_
