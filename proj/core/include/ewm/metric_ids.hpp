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
#include <optional>
#include <string_view>

namespace ewm {

/// The sixteen metrics, in canonical report order.
enum class MetricId : std::uint8_t {
  kImageQuality,
  kAestheticQuality,
  kJepaSimilarity,
  kDynamicDegree,
  kFlowScore,
  kMotionSmoothness,
  kSubjectConsistency,
  kBackgroundConsistency,
  kPhotometricConsistency,
  kInteractionQuality,
  kTrajectoryAccuracy,
  kDepthAccuracy,
  kPerspectivity,
  kInstructionFollowing,
  kSemanticAlignment,
  kActionFollowing,
};

inline constexpr std::size_t kMetricCount = 16;

inline constexpr std::array<MetricId, kMetricCount> kAllMetrics = {
    MetricId::kImageQuality,          MetricId::kAestheticQuality,
    MetricId::kJepaSimilarity,        MetricId::kDynamicDegree,
    MetricId::kFlowScore,             MetricId::kMotionSmoothness,
    MetricId::kSubjectConsistency,    MetricId::kBackgroundConsistency,
    MetricId::kPhotometricConsistency, MetricId::kInteractionQuality,
    MetricId::kTrajectoryAccuracy,    MetricId::kDepthAccuracy,
    MetricId::kPerspectivity,         MetricId::kInstructionFollowing,
    MetricId::kSemanticAlignment,     MetricId::kActionFollowing,
};

enum class Scale : std::uint8_t { kUnitInterval, kRaw };
enum class Granularity : std::uint8_t { kPerVideo, kPerModelCorpus };

constexpr std::size_t metric_index(MetricId id) { return static_cast<std::size_t>(id); }

std::string_view metric_name(MetricId id);
std::optional<MetricId> parse_metric_id(std::string_view name);
Scale metric_scale(MetricId id);
Granularity metric_granularity(MetricId id);

std::string_view scale_name(Scale scale);
std::string_view granularity_name(Granularity granularity);

}  // namespace ewm
