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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ewm/metric_ids.hpp"
#include "ewm/metrics.hpp"
#include "ewm/scoring.hpp"

namespace ewm {

/// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitGaps = 2;

enum class JudgeRunMode : std::uint8_t { kLive, kReplay, kSkip };

std::optional<JudgeRunMode> parse_judge_run_mode(std::string_view name);

struct RunConfig {
  std::filesystem::path bundle_root;
  /// Empty == every model in the bundle.
  std::vector<std::string> models;
  /// Empty == all sixteen metrics.
  std::set<MetricId> metrics;
  double gamma = 0.3;
  double alpha_dyn = 10.0;
  double semantic_weight = 1.0;
  double detection_conf_threshold = 0.25;
  DynamicPooling pooling = DynamicPooling::kPerFrame;
  std::optional<std::filesystem::path> bounds_path;
  JudgeRunMode judge_mode = JudgeRunMode::kReplay;
  unsigned parallelism = 1;
  /// Upper bound on concurrent live judge requests.
  unsigned judge_concurrency = 4;
  std::filesystem::path output_dir = "ewm-out";
  std::uint64_t seed = 0;
  std::string judge_endpoint;
  std::string judge_model;

  // report / correlate / import inputs
  std::optional<std::filesystem::path> vectors_dir;
  std::optional<std::filesystem::path> human_path;
  std::optional<std::filesystem::path> tasks_path;
  std::optional<std::filesystem::path> input_path;
  std::optional<std::filesystem::path> pairwise_path;

  void validate() const;
  bool wants(MetricId id) const { return metrics.empty() || metrics.count(id) != 0; }
  MetricConfig metric_config() const;
  ConfigSnapshot snapshot(const BoundsSet& bounds) const;
  BoundsSet load_bounds() const;
};

inline constexpr std::string_view kRawDir = "raw";
inline constexpr std::string_view kVectorsDir = "vectors";
inline constexpr std::string_view kValidationFile = "validation.json";
inline constexpr std::string_view kGapsFile = "gaps.json";
inline constexpr std::string_view kHumanFile = "human.json";
inline constexpr std::string_view kTasksFile = "tasks.json";
inline constexpr std::string_view kCorrelationsFile = "correlations.json";

/// Filesystem-safe form of an id: [A-Za-z0-9._-] kept, anything else as %XX.
std::string file_stem(std::string_view id);

int cmd_validate(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);
int cmd_correlate(const RunConfig& config, std::ostream& log);
int cmd_import_human(const RunConfig& config, std::ostream& log);
int cmd_import_tasks(const RunConfig& config, std::ostream& log);

}  // namespace ewm
