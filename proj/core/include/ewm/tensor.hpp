//==============================================================================
// Copyright (c) 2026 The ewmeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//==============================================================================
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ewm {

enum class DType : std::uint8_t {
  kFloat32 = 0,
  kUInt8 = 1,
};

std::size_t dtype_size(DType dtype);
std::string_view dtype_name(DType dtype);

inline constexpr char kTensorMagic[4] = {'W', 'A', 'B', 'T'};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::size_t kMaxTensorRank = 4;

/// Shape-only view of a tensor file, obtainable without reading the payload.
struct TensorHeader {
  DType dtype = DType::kFloat32;
  std::vector<std::uint64_t> dims;

  std::uint64_t element_count() const;
  std::size_t header_bytes() const;
  bool operator==(const TensorHeader&) const = default;
};

/// Dense row-major array backing frames, flows, depths and embeddings.
///
/// Equality is bit-exact on the payload (NaN payload bits included), which is
/// what the on-disk round-trip guarantees.
class TensorRecord {
 public:
  TensorRecord() = default;
  TensorRecord(std::vector<std::uint64_t> dims, std::vector<float> values);
  TensorRecord(std::vector<std::uint64_t> dims, std::vector<std::uint8_t> values);

  DType dtype() const;
  const std::vector<std::uint64_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::uint64_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::uint64_t element_count() const;
  TensorHeader header() const { return {dtype(), dims_}; }

  /// Typed access; throws ValidationError on a dtype mismatch.
  std::span<const float> floats() const;
  std::span<const std::uint8_t> bytes() const;

  /// Throws ValidationError naming the failed field.
  void validate() const;

  bool operator==(const TensorRecord& other) const;

 private:
  std::vector<std::uint64_t> dims_;
  std::variant<std::vector<float>, std::vector<std::uint8_t>> data_;
};

/// Exact on-disk encoding (header || little-endian payload).
std::vector<std::uint8_t> encode_tensor(const TensorRecord& record);
TensorRecord decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const TensorRecord& record, const std::filesystem::path& path);
TensorRecord read_tensor(const std::filesystem::path& path);
TensorHeader read_tensor_header(const std::filesystem::path& path);

}  // namespace ewm
