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
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ewm/scoring.hpp"

namespace ewm {

enum class TaskRole : std::uint8_t { kDataEngine, kActionPlanner, kPolicyEvalWm, kPolicyEvalSim };

std::string_view task_role_name(TaskRole role);
std::optional<TaskRole> parse_task_role(std::string_view name);

struct TaskResult {
  std::string model_id;
  std::string task_id;
  long trials = 0;
  long successes = 0;
  TaskRole role = TaskRole::kDataEngine;

  void validate() const;
};

struct TaskResultLedger {
  std::vector<TaskResult> entries;

  void validate() const;
  std::vector<TaskResult> with_role(TaskRole role) const;
  /// Pooled success rate per model for `role` (sum successes / sum trials).
  std::map<std::string, double> model_rates(TaskRole role) const;
};

/// successes / trials.
double success_rate(const TaskResult& entry);

struct PairedValue {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

struct Correlation {
  std::string x_name;
  std::string y_name;
  double r = 0.0;
  std::size_t n = 0;
  std::vector<PairedValue> pairs;
  /// Mean of (x - y), reported for policy evaluator comparisons.
  std::optional<double> mean_gap;

  nlohmann::json to_json() const;
};

/// Pearson r over labels present in both maps. The label sets must match.
Correlation correlate_series(const std::map<std::string, double>& x,
                             const std::map<std::string, double>& y, std::string x_name = "x",
                             std::string y_name = "y");

struct PolicyCorrelation {
  Correlation correlation;
  /// Mean of (wm - sim) over the paired policies.
  double mean_gap = 0.0;
};

/// Pairs policy_eval_wm with policy_eval_sim entries on (model_id, task_id).
PolicyCorrelation policy_evaluator_correlation(const TaskResultLedger& wm, const TaskResultLedger& sim);

enum class HumanDimension : std::uint8_t { kOverallQuality, kInstructionFollowing, kPhysicalAdherence };

inline constexpr std::size_t kHumanDimensionCount = 3;
inline constexpr std::array<HumanDimension, kHumanDimensionCount> kAllHumanDimensions = {
    HumanDimension::kOverallQuality, HumanDimension::kInstructionFollowing,
    HumanDimension::kPhysicalAdherence};

std::string_view human_dimension_name(HumanDimension d);
std::optional<HumanDimension> parse_human_dimension(std::string_view name);

struct HumanRating {
  std::string video_id;
  std::string model_id;
  HumanDimension dimension = HumanDimension::kOverallQuality;
  int likert = 3;
};

/// Per-dimension means on the 0..100 scale.
struct HumanScores {
  std::array<std::optional<double>, kHumanDimensionCount> dims{};

  /// Mean of the dimensions that have ratings.
  std::optional<double> overall() const;
  nlohmann::json to_json() const;
  static HumanScores from_json(const nlohmann::json& j);
};

std::map<std::string, HumanScores> aggregate_human(std::span<const HumanRating> ratings);

struct LeaderboardEntry {
  std::string model_id;
  MetricVector vector;
  double ewm_score = 0.0;
  HumanScores human;
  std::optional<double> win_rate;
  /// Keyed by task role name.
  std::map<std::string, double> task_success;

  static LeaderboardEntry from_vector(MetricVector v);
  void validate() const;
  nlohmann::json to_json() const;
};

enum class LeaderboardFormat : std::uint8_t { kMarkdown, kCsv, kJson };

std::optional<LeaderboardFormat> parse_leaderboard_format(std::string_view name);

/// Entries sorted by ewm_score descending, ties by model_id.
std::vector<LeaderboardEntry> rank_entries(std::span<const LeaderboardEntry> entries);

std::string emit_leaderboard(std::span<const LeaderboardEntry> entries, LeaderboardFormat format);

enum class RadarAxis : std::uint8_t { kVisual, kMotion, kConsistency, kPhysics, k3d, kControllability };

inline constexpr std::size_t kRadarAxisCount = 6;

std::string_view radar_axis_name(RadarAxis axis);
std::span<const MetricId> radar_axis_members(RadarAxis axis);

struct RadarRecord {
  std::string model_id;
  std::array<double, kRadarAxisCount> axes{};

  double operator[](RadarAxis a) const { return axes[static_cast<std::size_t>(a)]; }
  nlohmann::json to_json() const;
};

RadarRecord emit_radar(const LeaderboardEntry& entry);

/// {bounds_version, models, correlations}.
nlohmann::json build_report(std::span<const LeaderboardEntry> entries,
                            std::span<const Correlation> correlations);

/// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace ewm
