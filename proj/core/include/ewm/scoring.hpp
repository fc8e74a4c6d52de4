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

#include <array>
#include <cstddef>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ewm/metric_ids.hpp"
#include "ewm/metrics.hpp"

namespace ewm {

enum class Direction : std::uint8_t { kHigherBetter, kLowerBetter };

struct NormalizationBounds {
  MetricId metric = MetricId::kFlowScore;
  double max = 1.0;
  double min = 0.0;
  Direction direction = Direction::kHigherBetter;
};

/// Versioned set of empirical bounds, one entry per raw-scale metric.
struct BoundsSet {
  std::string version;
  std::vector<NormalizationBounds> bounds;

  const NormalizationBounds* find(MetricId id) const;
  void validate() const;

  /// Bounds shipped with the library (99th / 1st percentiles across the
  /// reference corpus).
  static BoundsSet defaults();
  static BoundsSet from_json(const nlohmann::json& j);
  static BoundsSet load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

inline constexpr std::string_view kDefaultBoundsVersion = "empirical-p99-p1-v1";

/// Clamped min-max map; lower_better inverts after clamping.
double normalize_metric(double raw, const NormalizationBounds& bounds);

/// Normalizes raw-scale metrics with `bounds`, passes unit-interval ones.
double normalize_value(const RawMetricValue& value, const BoundsSet& bounds);

struct ConfigSnapshot {
  double gamma = 0.3;
  double alpha_dyn = 10.0;
  double semantic_weight = 1.0;
  std::string bounds_version{kDefaultBoundsVersion};

  bool operator==(const ConfigSnapshot&) const = default;
  nlohmann::json to_json() const;
  static ConfigSnapshot from_json(const nlohmann::json& j);
};

struct PerVideoRecord {
  std::string video_id;
  RawMetricValue value;
};

/// Aggregation result that may still have gaps.
struct PartialMetricVector {
  std::string model_id;
  std::array<std::optional<double>, kMetricCount> values{};
  std::array<std::size_t, kMetricCount> sample_counts{};
  ConfigSnapshot config;

  std::vector<MetricId> missing() const;
  bool complete() const { return missing().empty(); }
};

/// The sixteen normalized values for one model.
struct MetricVector {
  std::string model_id;
  std::array<double, kMetricCount> values{};
  /// Videos contributing to each per-video mean (1 for corpus metrics).
  std::array<std::size_t, kMetricCount> sample_counts{};
  ConfigSnapshot config;

  double operator[](MetricId id) const { return values[metric_index(id)]; }
  double& operator[](MetricId id) { return values[metric_index(id)]; }
  void validate() const;

  nlohmann::json to_json() const;
  static MetricVector from_json(const nlohmann::json& j);
};

/// Per-video values are normalized individually, then averaged in video_id
/// order; corpus values are inserted once.
PartialMetricVector aggregate_metrics(std::string model_id, std::span<const PerVideoRecord> per_video,
                                      std::span<const RawMetricValue> corpus,
                                      const BoundsSet& bounds, const ConfigSnapshot& config);

/// As aggregate_metrics but throws IncompleteVectorError naming the gaps.
MetricVector assemble_metric_vector(std::string model_id, std::span<const PerVideoRecord> per_video,
                                    std::span<const RawMetricValue> corpus, const BoundsSet& bounds,
                                    const ConfigSnapshot& config);

MetricVector complete_vector(const PartialMetricVector& partial);

/// 100 * mean of the sixteen normalized values.
double ewm_score(const MetricVector& vector);

/// Throws BoundsMismatchError when vectors were normalized with different
/// bounds versions.
void require_uniform_bounds(std::span<const MetricVector> vectors);

/// Likert 1..5 -> 0..100.
double normalize_human_score(int likert);

enum class Winner : std::uint8_t { kA, kB, kTie };

struct PairwiseComparison {
  std::string model_a;
  std::string model_b;
  std::string video_id;
  Winner winner = Winner::kTie;
};

/// (wins + 0.5 * ties) / appearances.
double win_rate(std::string_view model, std::span<const PairwiseComparison> comparisons);

}  // namespace ewm
