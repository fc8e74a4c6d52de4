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
#include <span>
#include <vector>

#include "ewm/judge.hpp"
#include "ewm/kernels.hpp"
#include "ewm/metric_ids.hpp"

namespace ewm {

struct RawMetricValue {
  MetricId id = MetricId::kImageQuality;
  double value = 0.0;
  Scale scale = Scale::kUnitInterval;
  Granularity granularity = Granularity::kPerVideo;
};

struct DynamicPenaltyConfig {
  double gamma = 0.3;
  double alpha_dyn = 10.0;

  /// min(1, s_dyn / gamma)
  double penalty(double s_dyn) const;
  void validate() const;
};

/// How the top-5% flow magnitudes are pooled for the dynamic degree.
enum class DynamicPooling { kPerFrame, kWholeVideo };

struct DepthConfig {
  std::size_t target_frames = 40;
  double mask_min_depth = 1e-3;
  double epsilon = 1e-6;
};

struct MetricConfig {
  DynamicPenaltyConfig dynamic;
  DynamicPooling pooling = DynamicPooling::kPerFrame;
  double jepa_alpha = 40.0;
  double semantic_weight = 1.0;
  double detection_conf_threshold = 0.25;
  DepthConfig depth;
};

struct DetectionBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  double conf = 0.0;

  Point2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
};

/// Candidate boxes for each frame, in frame order.
using DetectionTrack = std::vector<std::vector<DetectionBox>>;

/// Floor applied to reciprocal denominators (1/NDTW, 1/E) so exact matches
/// land on the top of the normalized scale.
inline constexpr double kReciprocalGuard = 1e-8;

namespace metrics {

/// Per-frame MUSIQ-style scores on 0..100.
RawMetricValue image_quality(std::span<const double> frame_scores);
/// Per-frame aesthetic scores on 0..10.
RawMetricValue aesthetic_quality(std::span<const double> frame_scores);

/// exp(-alpha * max(0, MMD^2)) between generated and reference whole-video
/// embeddings.
RawMetricValue jepa_similarity(const std::vector<std::vector<double>>& generated,
                               const std::vector<std::vector<double>>& reference,
                               double alpha = 40.0);

/// Mean magnitude of the top 5% flow pixels (per frame then averaged, or
/// pooled over the whole clip).
double top_motion_magnitude(std::span<const Image> flows, DynamicPooling pooling);

double dynamic_threshold(std::size_t height, std::size_t width);

RawMetricValue dynamic_degree(std::span<const Image> flows, std::size_t height, std::size_t width,
                              const DynamicPenaltyConfig& cfg,
                              DynamicPooling pooling = DynamicPooling::kPerFrame);

RawMetricValue flow_score(std::span<const Image> flows);

struct SmoothnessTerm {
  double ssim = 0.0;
  double diff = 0.0;  // mean absolute difference of the neighbours, 0..255 scale
};

double motion_smoothness_from_terms(std::span<const SmoothnessTerm> terms);

/// `frames` are RGB in [0, 1]; `interpolated[k]` predicts frame 2k+1 from its
/// neighbours 2k and 2k+2.
std::vector<SmoothnessTerm> motion_smoothness_terms(std::span<const Image> frames,
                                                    std::span<const Image> interpolated);
RawMetricValue motion_smoothness(std::span<const Image> frames, std::span<const Image> interpolated);

/// Number of interpolation targets for a T-frame clip.
std::size_t interpolation_count(std::size_t frame_count);

double consistency_raw(const std::vector<std::vector<double>>& track);
RawMetricValue subject_consistency(const std::vector<std::vector<double>>& track, double s_dyn,
                                   const DynamicPenaltyConfig& cfg);
RawMetricValue background_consistency(const std::vector<std::vector<double>>& track, double s_dyn,
                                      const DynamicPenaltyConfig& cfg);

/// Mean per-pixel RGB residual after the forward/backward round-trip warp.
double photometric_error(std::span<const Image> frames, std::span<const Image> flow_fwd,
                         std::span<const Image> flow_bwd);
RawMetricValue photometric_consistency(std::span<const Image> frames,
                                       std::span<const Image> flow_fwd,
                                       std::span<const Image> flow_bwd, double s_dyn,
                                       const DynamicPenaltyConfig& cfg);

/// Centre of the best surviving box per frame, gaps filled by linear
/// interpolation (interior) or nearest valid centre (ends).
std::vector<Point2> trajectory_from_detections(const DetectionTrack& track, double conf_threshold);

RawMetricValue trajectory_accuracy_from_points(std::span<const Point2> gt,
                                               std::span<const Point2> generated);
RawMetricValue trajectory_accuracy(const DetectionTrack& gt, const DetectionTrack& generated,
                                   double conf_threshold);

/// Uniformly spaced indices into a stack of `count` frames.
std::vector<std::size_t> uniform_indices(std::size_t count, std::size_t samples);

/// Median-scaled AbsRel error between depth stacks (lower is better).
RawMetricValue depth_accuracy(std::span<const Image> generated, std::span<const Image> gt,
                              const DepthConfig& cfg = {});

RawMetricValue semantic_alignment(std::span<const double> generated, std::span<const double> gt,
                                  double weight = 1.0);

/// Mean pairwise (1 - max(cos, 0)) over instruction-variant embeddings.
RawMetricValue action_following(const std::vector<std::vector<double>>& variants);

double likert_to_unit(int score);
RawMetricValue interaction_quality(const JudgeVerdict& verdict);
RawMetricValue perspectivity(const JudgeVerdict& verdict);
RawMetricValue instruction_following(const JudgeVerdict& verdict);

}  // namespace metrics
}  // namespace ewm
