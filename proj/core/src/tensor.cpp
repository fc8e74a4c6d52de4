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
#include "ewm/tensor.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "ewm/error.hpp"

namespace ewm {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t checked_product(const std::vector<std::uint64_t>& dims) {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) {
      throw LengthError("tensor dims overflow a 64-bit element count");
    }
    n *= d;
  }
  return n;
}

void check_shape(const std::vector<std::uint64_t>& dims) {
  if (dims.empty() || dims.size() > kMaxTensorRank) {
    throw ValidationError("ndim: expected 1..4, got " + std::to_string(dims.size()));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) {
      throw ValidationError("dims[" + std::to_string(i) + "]: must be >= 1");
    }
  }
}

DType decode_dtype(std::uint8_t code) {
  switch (code) {
    case 0:
      return DType::kFloat32;
    case 1:
      return DType::kUInt8;
    default:
      throw VersionError("unknown dtype_code " + std::to_string(code));
  }
}

// Parses magic/version/dtype/ndim/dims; returns the header and its byte size.
TensorHeader decode_header(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kFixed = 10;
  if (bytes.size() < kFixed) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kTensorMagic, 4) != 0) {
      throw FormatError("bad magic: not a WABT tensor file");
    }
    throw LengthError("truncated tensor header");
  }
  if (std::memcmp(bytes.data(), kTensorMagic, 4) != 0) {
    throw FormatError("bad magic: not a WABT tensor file");
  }
  const auto version = get_u32(bytes.data() + 4);
  if (version != kTensorVersion) {
    throw VersionError("unsupported tensor version " + std::to_string(version));
  }
  TensorHeader header;
  header.dtype = decode_dtype(bytes[8]);
  const std::size_t ndim = bytes[9];
  if (ndim < 1 || ndim > kMaxTensorRank) {
    throw FormatError("ndim out of range: " + std::to_string(ndim));
  }
  if (bytes.size() < kFixed + 8 * ndim) throw LengthError("truncated tensor dims");
  header.dims.resize(ndim);
  for (std::size_t i = 0; i < ndim; ++i) {
    header.dims[i] = get_u64(bytes.data() + kFixed + 8 * i);
    if (header.dims[i] == 0) {
      throw FormatError("dims[" + std::to_string(i) + "] is zero");
    }
  }
  checked_product(header.dims);
  return header;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path, std::size_t limit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes;
  if (limit == std::numeric_limits<std::size_t>::max()) {
    bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else {
    bytes.resize(limit);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(limit));
    bytes.resize(static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  return bytes;
}

}  // namespace

std::size_t dtype_size(DType dtype) { return dtype == DType::kFloat32 ? 4 : 1; }

std::string_view dtype_name(DType dtype) {
  return dtype == DType::kFloat32 ? "float32" : "uint8";
}

std::uint64_t TensorHeader::element_count() const { return checked_product(dims); }

std::size_t TensorHeader::header_bytes() const { return 10 + 8 * dims.size(); }

TensorRecord::TensorRecord(std::vector<std::uint64_t> dims, std::vector<float> values)
    : dims_(std::move(dims)), data_(std::move(values)) {}

TensorRecord::TensorRecord(std::vector<std::uint64_t> dims, std::vector<std::uint8_t> values)
    : dims_(std::move(dims)), data_(std::move(values)) {}

DType TensorRecord::dtype() const {
  return std::holds_alternative<std::vector<float>>(data_) ? DType::kFloat32 : DType::kUInt8;
}

std::uint64_t TensorRecord::element_count() const { return checked_product(dims_); }

std::span<const float> TensorRecord::floats() const {
  if (const auto* v = std::get_if<std::vector<float>>(&data_)) return *v;
  throw ValidationError("dtype: expected float32 tensor, got uint8");
}

std::span<const std::uint8_t> TensorRecord::bytes() const {
  if (const auto* v = std::get_if<std::vector<std::uint8_t>>(&data_)) return *v;
  throw ValidationError("dtype: expected uint8 tensor, got float32");
}

void TensorRecord::validate() const {
  check_shape(dims_);
  const auto expected = element_count();
  const auto actual = std::visit([](const auto& v) { return v.size(); }, data_);
  if (actual != expected) {
    throw ValidationError("payload: " + std::to_string(actual) + " elements, dims imply " +
                          std::to_string(expected));
  }
}

bool TensorRecord::operator==(const TensorRecord& other) const {
  if (dims_ != other.dims_ || dtype() != other.dtype()) return false;
  return std::visit(
      [&](const auto& mine) {
        using V = std::decay_t<decltype(mine)>;
        const auto& theirs = std::get<V>(other.data_);
        return mine.size() == theirs.size() &&
               (mine.empty() ||
                std::memcmp(mine.data(), theirs.data(),
                            mine.size() * sizeof(typename V::value_type)) == 0);
      },
      data_);
}

std::vector<std::uint8_t> encode_tensor(const TensorRecord& record) {
  record.validate();
  std::vector<std::uint8_t> out;
  const auto n = record.element_count();
  out.reserve(record.header().header_bytes() + n * dtype_size(record.dtype()));
  out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
  put_u32(out, kTensorVersion);
  out.push_back(static_cast<std::uint8_t>(record.dtype()));
  out.push_back(static_cast<std::uint8_t>(record.rank()));
  for (auto d : record.dims()) put_u64(out, d);
  if (record.dtype() == DType::kFloat32) {
    for (float f : record.floats()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  } else {
    const auto b = record.bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

TensorRecord decode_tensor(std::span<const std::uint8_t> bytes) {
  const auto header = decode_header(bytes);
  const auto n = header.element_count();
  const auto offset = header.header_bytes();
  const auto payload = bytes.size() - offset;
  const auto want = n * dtype_size(header.dtype);
  if (payload != want) {
    throw LengthError("payload is " + std::to_string(payload) + " bytes, header implies " +
                      std::to_string(want));
  }
  const std::uint8_t* p = bytes.data() + offset;
  if (header.dtype == DType::kFloat32) {
    std::vector<float> values(n);
    for (std::uint64_t i = 0; i < n; ++i) values[i] = std::bit_cast<float>(get_u32(p + 4 * i));
    return TensorRecord(header.dims, std::move(values));
  }
  return TensorRecord(header.dims, std::vector<std::uint8_t>(p, p + n));
}

void write_tensor(const TensorRecord& record, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(record);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path.string());
}

TensorRecord read_tensor(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such tensor file: " + path.string());
  const auto bytes = slurp(path, std::numeric_limits<std::size_t>::max());
  return decode_tensor(bytes);
}

TensorHeader read_tensor_header(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such tensor file: " + path.string());
  const auto head = slurp(path, 10 + 8 * kMaxTensorRank);
  auto header = decode_header(head);
  const auto size = std::filesystem::file_size(path);
  const auto want = header.header_bytes() + header.element_count() * dtype_size(header.dtype);
  if (size != want) {
    throw LengthError(path.string() + ": file is " + std::to_string(size) +
                      " bytes, header implies " + std::to_string(want));
  }
  return header;
}

}  // namespace ewm
