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

#include "ewm/csv.hpp"
#include "ewm/error.hpp"
#include "support/synthetic.hpp"

namespace ewm {
namespace {

using Rows = std::vector<std::vector<std::string>>;

TEST(Csv, Rfc4180) {
  EXPECT_EQ(parse_csv("a,b\n1,2\n"), (Rows{{"a", "b"}, {"1", "2"}}));
  EXPECT_EQ(parse_csv("a,b\r\n1,2"), (Rows{{"a", "b"}, {"1", "2"}}));
  EXPECT_EQ(parse_csv("\"x,y\",\"he said \"\"hi\"\"\"\n"), (Rows{{"x,y", "he said \"hi\""}}));
  EXPECT_EQ(parse_csv("\"multi\nline\",z\n"), (Rows{{"multi\nline", "z"}}));
  EXPECT_EQ(parse_csv("a,,c\n"), (Rows{{"a", "", "c"}}));
  EXPECT_EQ(parse_csv(""), Rows{});
  EXPECT_THROW(parse_csv("\"open\n"), ParseError);
}

TEST(Csv, HumanRatings) {
  const auto r = parse_human_csv(
      "video_id,model_id,dimension,likert\n"
      "v1,m,overall_quality,5\n"
      "v1,m,physical_adherence,2\n");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].dimension, HumanDimension::kPhysicalAdherence);
  EXPECT_EQ(r[1].likert, 2);
  EXPECT_THROW(parse_human_csv("video_id,model_id,likert\nv,m,3\n"), SchemaError);
  EXPECT_THROW(parse_human_csv("video_id,model_id,dimension,likert\nv,m,overall_quality,6\n"),
               RangeError);
  EXPECT_THROW(parse_human_csv("video_id,model_id,dimension,likert\nv,m,overall_quality,x\n"),
               ParseError);
  EXPECT_THROW(parse_human_csv("video_id,model_id,dimension,likert\nv,m,beauty,3\n"), SchemaError);
}

TEST(Csv, Pairwise) {
  const auto c = parse_pairwise_csv(
      "model_a,model_b,video_id,winner\n"
      "x,y,v1,a\n"
      "x,y,v2,b\n"
      "y,x,v3,tie\n");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[1].winner, Winner::kB);
  EXPECT_EQ(c[2].winner, Winner::kTie);
  EXPECT_DOUBLE_EQ(win_rate("x", c), 0.5);
  EXPECT_THROW(parse_pairwise_csv("model_a,model_b,video_id,winner\nx,y,v,both\n"), Error);
}

TEST(Csv, LedgerRoundTrip) {
  const auto l = parse_ledger_csv(
      "model_id,task_id,trials,successes,role\n"
      "WoW,task1,100,45,data_engine\n"
      "\"pi0.5, real\",task1,100,77,action_planner\n");
  ASSERT_EQ(l.entries.size(), 2u);
  EXPECT_EQ(l.entries[1].model_id, "pi0.5, real");
  EXPECT_DOUBLE_EQ(success_rate(l.entries[0]), 0.45);
  const auto back = parse_ledger_csv(ledger_to_csv(l));
  ASSERT_EQ(back.entries.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.entries[i].model_id, l.entries[i].model_id);
    EXPECT_EQ(back.entries[i].successes, l.entries[i].successes);
    EXPECT_EQ(back.entries[i].role, l.entries[i].role);
  }
  EXPECT_THROW(parse_ledger_csv("model_id,task_id,trials,successes,role\nm,t,10,11,data_engine\n"),
               RangeError);
  EXPECT_THROW(parse_ledger_csv("model_id,task_id,trials,successes,role\nm,t,10,1,nope\n"),
               SchemaError);
}

TEST(Csv, ReadFromDisk) {
  testing::ScratchDir dir;
  testing::write_file(dir / "h.csv", "video_id,model_id,dimension,likert\nv,m,overall_quality,4\n");
  EXPECT_EQ(read_human_csv(dir / "h.csv").size(), 1u);
  EXPECT_THROW(read_human_csv(dir / "none.csv"), IoError);
}

}  // namespace
}  // namespace ewm
