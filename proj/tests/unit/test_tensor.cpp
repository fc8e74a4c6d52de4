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
#include <gtest/gtest.h>

#include <bit>

#include <random>

#include "ewm/error.hpp"
#include "ewm/tensor.hpp"
#include "support/synthetic.hpp"

namespace ewm {
namespace {

using testing::read_file;
using testing::ScratchDir;
using testing::write_file;

TEST(Tensor, TwoByTwoFloatFileLayout) {
  ScratchDir dir;
  const TensorRecord rec({2, 2}, std::vector<float>{1, 2, 3, 4});
  write_tensor(rec, dir / "t.wabt");
  const auto bytes = read_file(dir / "t.wabt");
  // 4 magic + 4 version + 1 dtype + 1 ndim + 2*8 dims, then 4 floats.
  ASSERT_EQ(bytes.size(), 42u);
  EXPECT_EQ(bytes.substr(0, 4), "WABT");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[8], 0);  // float32
  EXPECT_EQ(bytes[9], 2);  // ndim
  EXPECT_EQ(static_cast<unsigned char>(bytes[10]), 2u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[18]), 2u);
  // 1.0f little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[26]), 0x00);
  EXPECT_EQ(static_cast<unsigned char>(bytes[29]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[28]), 0x80);
}

TEST(Tensor, RewriteIsByteIdentical) {
  ScratchDir dir;
  const TensorRecord rec({3}, std::vector<std::uint8_t>{7, 8, 9});
  write_tensor(rec, dir / "a.wabt");
  write_tensor(read_tensor(dir / "a.wabt"), dir / "b.wabt");
  EXPECT_EQ(read_file(dir / "a.wabt"), read_file(dir / "b.wabt"));
}

TEST(Tensor, RoundTripRandomShapesBitExact) {
  ScratchDir dir;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> rank(1, 4);
  std::uniform_int_distribution<int> extent(1, 5);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint64_t> dims(static_cast<std::size_t>(rank(rng)));
    std::uint64_t n = 1;
    for (auto& d : dims) n *= (d = static_cast<std::uint64_t>(extent(rng)));
    TensorRecord rec;
    if (i % 2 == 0) {
      std::vector<float> v(n);
      // arbitrary bit patterns, including NaN payloads and signed zeros
      for (auto& x : v) x = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
      rec = TensorRecord(dims, v);
    } else {
      std::vector<std::uint8_t> v(n);
      for (auto& x : v) x = static_cast<std::uint8_t>(rng());
      rec = TensorRecord(dims, v);
    }
    const auto path = dir / ("r" + std::to_string(i) + ".wabt");
    write_tensor(rec, path);
    EXPECT_TRUE(read_tensor(path) == rec) << "case " << i;
    EXPECT_EQ(decode_tensor(encode_tensor(rec)), rec);
  }
}

TEST(Tensor, WriteRejectsBadRank) {
  ScratchDir dir;
  EXPECT_THROW(write_tensor(TensorRecord({}, std::vector<float>{}), dir / "z.wabt"), ValidationError);
  EXPECT_THROW(write_tensor(TensorRecord({1, 1, 1, 1, 1}, std::vector<float>{1}), dir / "z.wabt"),
               ValidationError);
  EXPECT_THROW(write_tensor(TensorRecord({2, 0}, std::vector<float>{}), dir / "z.wabt"),
               ValidationError);
}

TEST(Tensor, ReadErrorsAreClassified) {
  ScratchDir dir;
  const TensorRecord rec({10, 10}, std::vector<float>(100, 1.0f));
  write_tensor(rec, dir / "ok.wabt");
  auto bytes = read_file(dir / "ok.wabt");

  auto bad_magic = bytes;
  bad_magic.replace(0, 4, "XXXX");
  write_file(dir / "magic.wabt", bad_magic);
  EXPECT_THROW(read_tensor(dir / "magic.wabt"), FormatError);

  auto bad_version = bytes;
  bad_version[4] = 2;
  write_file(dir / "version.wabt", bad_version);
  EXPECT_THROW(read_tensor(dir / "version.wabt"), VersionError);

  auto bad_dtype = bytes;
  bad_dtype[8] = 9;
  write_file(dir / "dtype.wabt", bad_dtype);
  EXPECT_THROW(read_tensor(dir / "dtype.wabt"), VersionError);

  // header claims 100 elements, payload holds 50
  write_file(dir / "short.wabt", bytes.substr(0, bytes.size() - 50 * 4));
  EXPECT_THROW(read_tensor(dir / "short.wabt"), LengthError);
  EXPECT_THROW(read_tensor_header(dir / "short.wabt"), LengthError);

  write_file(dir / "long.wabt", bytes + "x");
  EXPECT_THROW(read_tensor(dir / "long.wabt"), LengthError);

  write_file(dir / "tiny.wabt", "WAB");
  EXPECT_THROW(read_tensor(dir / "tiny.wabt"), Error);

  EXPECT_THROW(read_tensor(dir / "absent.wabt"), IoError);
}

TEST(Tensor, HeaderReadDoesNotNeedPayloadParse) {
  ScratchDir dir;
  write_tensor(TensorRecord({4, 3, 2}, std::vector<std::uint8_t>(24, 1)), dir / "h.wabt");
  const auto h = read_tensor_header(dir / "h.wabt");
  EXPECT_EQ(h.dtype, DType::kUInt8);
  EXPECT_EQ(h.dims, (std::vector<std::uint64_t>{4, 3, 2}));
  EXPECT_EQ(h.element_count(), 24u);
}

}  // namespace
}  // namespace ewm
