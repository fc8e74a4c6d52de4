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

#include <random>

#include "ewm/error.hpp"
#include "ewm/published.hpp"
#include "ewm/scoring.hpp"
#include "support/synthetic.hpp"

namespace ewm {
namespace {

const NormalizationBounds& bound(MetricId id) {
  static const BoundsSet set = BoundsSet::defaults();
  return *set.find(id);
}

MetricVector filled(double v, std::string model = "m") {
  MetricVector out;
  out.model_id = std::move(model);
  out.values.fill(v);
  out.sample_counts.fill(1);
  return out;
}

TEST(Bounds, Defaults) {
  const auto b = BoundsSet::defaults();
  EXPECT_EQ(b.version, kDefaultBoundsVersion);
  EXPECT_EQ(b.bounds.size(), 5u);
  EXPECT_NO_THROW(b.validate());
  EXPECT_EQ(bound(MetricId::kPhotometricConsistency).max, 6.7899);
  EXPECT_EQ(bound(MetricId::kPhotometricConsistency).min, 0.1257);
  EXPECT_EQ(bound(MetricId::kMotionSmoothness).max, 2.6413);
  EXPECT_EQ(bound(MetricId::kMotionSmoothness).min, 0.0);
  EXPECT_EQ(bound(MetricId::kTrajectoryAccuracy).max, 40.8540);
  EXPECT_EQ(bound(MetricId::kFlowScore).max, 8.9414);
  EXPECT_EQ(bound(MetricId::kFlowScore).min, 0.0531);
  EXPECT_EQ(bound(MetricId::kDepthAccuracy).max, 4.3711);
  EXPECT_EQ(bound(MetricId::kDepthAccuracy).min, 0.2228);
  EXPECT_EQ(bound(MetricId::kDepthAccuracy).direction, Direction::kLowerBetter);
  EXPECT_EQ(b.find(MetricId::kImageQuality), nullptr);
}

TEST(Bounds, JsonRoundTripAndValidation) {
  const auto b = BoundsSet::defaults();
  const auto back = BoundsSet::from_json(b.to_json());
  EXPECT_EQ(back.version, b.version);
  EXPECT_EQ(back.to_json(), b.to_json());

  auto j = b.to_json();
  j.erase(j.begin());
  EXPECT_THROW(BoundsSet::from_json(j), ValidationError);
  j = b.to_json();
  j[0]["version"] = "other";
  EXPECT_THROW(BoundsSet::from_json(j), ValidationError);
  j = b.to_json();
  j[0]["max"] = j[0]["min"];
  EXPECT_THROW(BoundsSet::from_json(j), ValidationError);
  j = b.to_json();
  j.push_back(j[0]);
  EXPECT_THROW(BoundsSet::from_json(j), ValidationError);
  j = b.to_json();
  j[0]["metric_id"] = "image_quality";
  EXPECT_THROW(BoundsSet::from_json(j), ValidationError);
  j = b.to_json();
  for (auto& e : j) {
    if (e["metric_id"] == "depth_accuracy") e["direction"] = "higher_better";
  }
  EXPECT_THROW(BoundsSet::from_json(j), ValidationError);
  EXPECT_THROW(BoundsSet::from_json(nlohmann::json::object()), ValidationError);
}

TEST(Bounds, LoadFromFile) {
  testing::ScratchDir dir;
  testing::write_file(dir / "b.json", BoundsSet::defaults().to_json().dump());
  EXPECT_EQ(BoundsSet::load(dir / "b.json").version, kDefaultBoundsVersion);
  EXPECT_THROW(BoundsSet::load(dir / "none.json"), IoError);
  testing::write_file(dir / "bad.json", "[");
  EXPECT_THROW(BoundsSet::load(dir / "bad.json"), FormatError);
}

TEST(Normalize, Examples) {
  const auto& flow = bound(MetricId::kFlowScore);
  EXPECT_EQ(normalize_metric(8.9414, flow), 1.0);
  EXPECT_EQ(normalize_metric(0.0531, flow), 0.0);
  EXPECT_NEAR(normalize_metric(4.49725, flow), 0.5, 1e-12);
  EXPECT_EQ(normalize_metric(100.0, flow), 1.0);
  EXPECT_EQ(normalize_metric(-3.0, flow), 0.0);
  const auto& depth = bound(MetricId::kDepthAccuracy);
  EXPECT_EQ(normalize_metric(0.2228, depth), 1.0);
  EXPECT_EQ(normalize_metric(4.3711, depth), 0.0);
  EXPECT_EQ(normalize_metric(0.0, depth), 1.0);
  EXPECT_NEAR(normalize_metric((0.2228 + 4.3711) / 2, depth), 0.5, 1e-12);
}

TEST(Normalize, PassThroughUnitInterval) {
  const auto b = BoundsSet::defaults();
  const RawMetricValue v{MetricId::kSubjectConsistency, 0.42, Scale::kUnitInterval,
                         Granularity::kPerVideo};
  EXPECT_EQ(normalize_value(v, b), 0.42);
  const RawMetricValue f{MetricId::kFlowScore, 8.9414, Scale::kRaw, Granularity::kPerVideo};
  EXPECT_EQ(normalize_value(f, b), 1.0);
  BoundsSet empty{"x", {}};
  EXPECT_THROW(normalize_value(f, empty), ValidationError);
}

TEST(Normalize, MonotoneProperty) {
  std::mt19937_64 rng(12);
  for (const auto& b : BoundsSet::defaults().bounds) {
    std::uniform_real_distribution<double> u(b.min - 1.0, b.max + 1.0);
    for (int i = 0; i < 200; ++i) {
      double x = u(rng);
      double y = u(rng);
      if (x > y) std::swap(x, y);
      const double nx = normalize_metric(x, b);
      const double ny = normalize_metric(y, b);
      EXPECT_GE(nx, 0.0);
      EXPECT_LE(ny, 1.0);
      if (b.direction == Direction::kHigherBetter) {
        EXPECT_LE(nx, ny);
      } else {
        EXPECT_GE(nx, ny);
      }
    }
  }
}

RawMetricValue raw(MetricId id, double v) {
  return {id, v, metric_scale(id), metric_granularity(id)};
}

std::vector<PerVideoRecord> full_video(const std::string& id, double unit, double flow) {
  std::vector<PerVideoRecord> out;
  for (auto m : kAllMetrics) {
    if (metric_granularity(m) != Granularity::kPerVideo) continue;
    double v = unit;
    if (m == MetricId::kFlowScore) v = flow;
    if (m == MetricId::kDepthAccuracy) v = 0.2228;
    if (m == MetricId::kPhotometricConsistency) v = 1e8;
    if (m == MetricId::kTrajectoryAccuracy) v = 1e8;
    if (m == MetricId::kMotionSmoothness) v = 2.6413;
    out.push_back({id, raw(m, v)});
  }
  return out;
}

TEST(Aggregate, BoundaryCompositionIsAllOnes) {
  const auto recs = full_video("v0", 1.0, 8.9414);
  const std::vector<RawMetricValue> corpus = {raw(MetricId::kJepaSimilarity, 1.0),
                                              raw(MetricId::kActionFollowing, 1.0)};
  const auto v = assemble_metric_vector("m", recs, corpus, BoundsSet::defaults(), {});
  for (double x : v.values) EXPECT_EQ(x, 1.0);
  EXPECT_EQ(ewm_score(v), 100.0);
  EXPECT_EQ(v.sample_counts[metric_index(MetricId::kFlowScore)], 1u);
}

TEST(Aggregate, MeanOverVideos) {
  std::vector<PerVideoRecord> recs = {{"b", raw(MetricId::kSubjectConsistency, 0.6)},
                                      {"a", raw(MetricId::kSubjectConsistency, 0.8)}};
  const auto p = aggregate_metrics("m", recs, {}, BoundsSet::defaults(), {});
  ASSERT_TRUE(p.values[metric_index(MetricId::kSubjectConsistency)].has_value());
  EXPECT_NEAR(*p.values[metric_index(MetricId::kSubjectConsistency)], 0.7, 1e-15);
  EXPECT_EQ(p.sample_counts[metric_index(MetricId::kSubjectConsistency)], 2u);
  EXPECT_FALSE(p.complete());
  EXPECT_EQ(p.missing().size(), 15u);
}

TEST(Aggregate, NormalizesBeforeAveraging) {
  // one video far above the bound clamps to 1 before the mean
  std::vector<PerVideoRecord> recs = {{"a", raw(MetricId::kFlowScore, 100.0)},
                                      {"b", raw(MetricId::kFlowScore, 0.0531)}};
  const auto p = aggregate_metrics("m", recs, {}, BoundsSet::defaults(), {});
  EXPECT_DOUBLE_EQ(*p.values[metric_index(MetricId::kFlowScore)], 0.5);
}

TEST(Aggregate, MissingDepthNamesMetric) {
  auto recs = full_video("v0", 1.0, 8.9414);
  std::erase_if(recs, [](const auto& r) { return r.value.id == MetricId::kDepthAccuracy; });
  const std::vector<RawMetricValue> corpus = {raw(MetricId::kJepaSimilarity, 1.0),
                                              raw(MetricId::kActionFollowing, 1.0)};
  try {
    assemble_metric_vector("m", recs, corpus, BoundsSet::defaults(), {});
    FAIL() << "no throw";
  } catch (const IncompleteVectorError& e) {
    EXPECT_NE(std::string(e.what()).find("depth_accuracy"), std::string::npos);
  }
}

TEST(Aggregate, Errors) {
  std::vector<PerVideoRecord> dup = {{"a", raw(MetricId::kFlowScore, 1.0)},
                                     {"a", raw(MetricId::kFlowScore, 2.0)}};
  EXPECT_THROW(aggregate_metrics("m", dup, {}, BoundsSet::defaults(), {}), ValidationError);
  std::vector<PerVideoRecord> corpus_as_video = {{"a", raw(MetricId::kJepaSimilarity, 1.0)}};
  EXPECT_THROW(aggregate_metrics("m", corpus_as_video, {}, BoundsSet::defaults(), {}),
               ValidationError);
  const std::vector<RawMetricValue> video_as_corpus = {raw(MetricId::kFlowScore, 1.0)};
  EXPECT_THROW(aggregate_metrics("m", {}, video_as_corpus, BoundsSet::defaults(), {}),
               ValidationError);
}

TEST(Aggregate, OrderIndependent) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PerVideoRecord> recs;
  for (int i = 0; i < 50; ++i) {
    recs.push_back({"v" + std::to_string(i), raw(MetricId::kImageQuality, u(rng))});
  }
  const auto a = aggregate_metrics("m", recs, {}, BoundsSet::defaults(), {});
  std::shuffle(recs.begin(), recs.end(), rng);
  const auto b = aggregate_metrics("m", recs, {}, BoundsSet::defaults(), {});
  EXPECT_EQ(*a.values[0], *b.values[0]);
}

TEST(Vector, JsonRoundTrip) {
  auto v = published::to_vector(*published::find_row("Wan 2.6"));
  const auto j = v.to_json();
  EXPECT_EQ(j.at("bounds_version"), kDefaultBoundsVersion);
  EXPECT_EQ(j.at("values").size(), 16u);
  const auto back = MetricVector::from_json(j);
  EXPECT_EQ(back.values, v.values);
  EXPECT_EQ(back.sample_counts, v.sample_counts);
  EXPECT_EQ(back.config, v.config);

  auto broken = j;
  broken["values"].erase("depth_accuracy");
  try {
    MetricVector::from_json(broken);
    FAIL() << "no throw";
  } catch (const IncompleteVectorError& e) {
    EXPECT_NE(std::string(e.what()).find("depth_accuracy"), std::string::npos);
  }
  v.values[3] = 1.5;
  EXPECT_THROW(v.validate(), RangeError);
}

TEST(Config, Snapshot) {
  ConfigSnapshot c;
  c.gamma = 0.25;
  EXPECT_EQ(ConfigSnapshot::from_json(c.to_json()), c);
  EXPECT_THROW(ConfigSnapshot::from_json(nlohmann::json::array()), ValidationError);
}

TEST(EwmScore, Examples) {
  EXPECT_EQ(ewm_score(filled(1.0)), 100.0);
  EXPECT_EQ(ewm_score(filled(0.0)), 0.0);
  EXPECT_NEAR(ewm_score(published::to_vector(*published::find_row("Wan 2.6"))), 61.86, 0.01);
}

TEST(EwmScore, MonotoneInEachMetric) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    auto v = filled(0.0);
    for (auto& x : v.values) x = u(rng);
    const auto k = rng() % kMetricCount;
    auto w = v;
    w.values[k] = v.values[k] + (1.0 - v.values[k]) * u(rng);
    EXPECT_GE(ewm_score(w), ewm_score(v));
  }
}

TEST(Bounds, UniformCheck) {
  auto a = filled(0.5, "a");
  auto b = filled(0.5, "b");
  const std::vector<MetricVector> same = {a, b};
  EXPECT_NO_THROW(require_uniform_bounds(same));
  b.config.bounds_version = "other";
  const std::vector<MetricVector> mixed = {a, b};
  EXPECT_THROW(require_uniform_bounds(mixed), BoundsMismatchError);
}

TEST(Human, LikertScale) {
  EXPECT_EQ(normalize_human_score(1), 0.0);
  EXPECT_EQ(normalize_human_score(5), 100.0);
  EXPECT_EQ(normalize_human_score(3), 50.0);
  EXPECT_THROW(normalize_human_score(6), RangeError);
  EXPECT_THROW(normalize_human_score(0), RangeError);
}

TEST(Human, WinRate) {
  std::vector<PairwiseComparison> c;
  for (int i = 0; i < 7; ++i) c.push_back({"x", "y", "v" + std::to_string(i), Winner::kA});
  for (int i = 0; i < 3; ++i) c.push_back({"y", "x", "w" + std::to_string(i), Winner::kA});
  EXPECT_DOUBLE_EQ(win_rate("x", c), 0.7);
  EXPECT_DOUBLE_EQ(win_rate("y", c), 0.3);
  const std::vector<PairwiseComparison> tie = {{"x", "y", "a", Winner::kA},
                                               {"y", "x", "b", Winner::kTie}};
  EXPECT_DOUBLE_EQ(win_rate("x", tie), 0.75);
  EXPECT_THROW(win_rate("z", tie), SampleSizeError);
  const std::vector<PairwiseComparison> self = {{"x", "x", "a", Winner::kA}};
  EXPECT_THROW(win_rate("x", self), ValidationError);
}

}  // namespace
}  // namespace ewm
