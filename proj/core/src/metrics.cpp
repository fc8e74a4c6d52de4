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
#include "ewm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ewm/error.hpp"

namespace ewm {
namespace {

struct MetricTraits {
  MetricId id;
  std::string_view name;
  Scale scale;
  Granularity granularity;
};

constexpr std::array<MetricTraits, kMetricCount> kTraits = {{
    {MetricId::kImageQuality, "image_quality", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kAestheticQuality, "aesthetic_quality", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kJepaSimilarity, "jepa_similarity", Scale::kUnitInterval, Granularity::kPerModelCorpus},
    {MetricId::kDynamicDegree, "dynamic_degree", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kFlowScore, "flow_score", Scale::kRaw, Granularity::kPerVideo},
    {MetricId::kMotionSmoothness, "motion_smoothness", Scale::kRaw, Granularity::kPerVideo},
    {MetricId::kSubjectConsistency, "subject_consistency", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kBackgroundConsistency, "background_consistency", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kPhotometricConsistency, "photometric_consistency", Scale::kRaw, Granularity::kPerVideo},
    {MetricId::kInteractionQuality, "interaction_quality", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kTrajectoryAccuracy, "trajectory_accuracy", Scale::kRaw, Granularity::kPerVideo},
    {MetricId::kDepthAccuracy, "depth_accuracy", Scale::kRaw, Granularity::kPerVideo},
    {MetricId::kPerspectivity, "perspectivity", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kInstructionFollowing, "instruction_following", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kSemanticAlignment, "semantic_alignment", Scale::kUnitInterval, Granularity::kPerVideo},
    {MetricId::kActionFollowing, "action_following", Scale::kUnitInterval, Granularity::kPerModelCorpus},
}};

RawMetricValue make(MetricId id, double value) {
  return {id, value, metric_scale(id), metric_granularity(id)};
}

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double frame_score_mean(std::span<const double> scores, double ceiling, const char* what) {
  if (scores.empty()) throw SampleSizeError(std::string(what) + ": empty score vector");
  for (double s : scores) {
    if (!(s >= 0.0 && s <= ceiling)) {
      throw RangeError(std::string(what) + ": frame score " + std::to_string(s) +
                       " outside [0, " + std::to_string(ceiling) + "]");
    }
  }
  return mean_of(scores) / ceiling;
}

std::vector<double> flow_magnitudes(const Image& flow) {
  if (flow.channels != 2) throw ShapeError("flow field must have 2 channels");
  std::vector<double> mags(flow.pixel_count());
  for (std::size_t p = 0; p < mags.size(); ++p) {
    mags[p] = std::hypot(static_cast<double>(flow.data[2 * p]),
                         static_cast<double>(flow.data[2 * p + 1]));
  }
  return mags;
}

double top_fraction_mean(std::vector<double> mags) {
  // ceil(5% of the pixel count), at least one pixel.
  const std::size_t k = std::max<std::size_t>(1, (mags.size() * 5 + 99) / 100);
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k - 1), mags.end(),
                   std::greater<>());
  std::sort(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += mags[i];
  return sum / static_cast<double>(k);
}

RawMetricValue consistency(MetricId id, const std::vector<std::vector<double>>& track, double s_dyn,
                           const DynamicPenaltyConfig& cfg) {
  return make(id, metrics::consistency_raw(track) * cfg.penalty(s_dyn));
}

void require_same_plane(const Image& a, const Image& b, const char* what) {
  if (a.height != b.height || a.width != b.width) {
    throw ShapeError(std::string(what) + ": spatial size mismatch");
  }
}

double verdict_unit(const JudgeVerdict& verdict, const DimensionVerdict& dim) {
  if (verdict.kind != VerdictKind::kQuality) {
    throw SchemaError("verdict is not a quality verdict");
  }
  return metrics::likert_to_unit(dim.score);
}

}  // namespace

std::string_view metric_name(MetricId id) { return kTraits[metric_index(id)].name; }

std::optional<MetricId> parse_metric_id(std::string_view name) {
  for (const auto& t : kTraits) {
    if (t.name == name) return t.id;
  }
  return std::nullopt;
}

Scale metric_scale(MetricId id) { return kTraits[metric_index(id)].scale; }

Granularity metric_granularity(MetricId id) { return kTraits[metric_index(id)].granularity; }

std::string_view scale_name(Scale scale) {
  return scale == Scale::kUnitInterval ? "unit_interval" : "raw_needs_normalization";
}

std::string_view granularity_name(Granularity granularity) {
  return granularity == Granularity::kPerVideo ? "per_video" : "per_model_corpus";
}

double DynamicPenaltyConfig::penalty(double s_dyn) const { return std::min(1.0, s_dyn / gamma); }

void DynamicPenaltyConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (!(alpha_dyn > 0.0)) throw ValidationError("alpha_dyn must be > 0");
}

namespace metrics {

RawMetricValue image_quality(std::span<const double> frame_scores) {
  return make(MetricId::kImageQuality, frame_score_mean(frame_scores, 100.0, "image_quality"));
}

RawMetricValue aesthetic_quality(std::span<const double> frame_scores) {
  return make(MetricId::kAestheticQuality, frame_score_mean(frame_scores, 10.0, "aesthetic_quality"));
}

RawMetricValue jepa_similarity(const std::vector<std::vector<double>>& generated,
                               const std::vector<std::vector<double>>& reference, double alpha) {
  const double mmd2 = kernels::mmd2_poly_unbiased(generated, reference, KernelSpec{});
  return make(MetricId::kJepaSimilarity, std::exp(-alpha * std::max(0.0, mmd2)));
}

double top_motion_magnitude(std::span<const Image> flows, DynamicPooling pooling) {
  if (flows.empty()) throw SampleSizeError("dynamic_degree: no flow fields");
  if (pooling == DynamicPooling::kWholeVideo) {
    std::vector<double> all;
    for (const auto& f : flows) {
      auto m = flow_magnitudes(f);
      all.insert(all.end(), m.begin(), m.end());
    }
    return top_fraction_mean(std::move(all));
  }
  double sum = 0.0;
  for (const auto& f : flows) sum += top_fraction_mean(flow_magnitudes(f));
  return sum / static_cast<double>(flows.size());
}

double dynamic_threshold(std::size_t height, std::size_t width) {
  return 6.0 / 256.0 * static_cast<double>(std::min(height, width));
}

RawMetricValue dynamic_degree(std::span<const Image> flows, std::size_t height, std::size_t width,
                              const DynamicPenaltyConfig& cfg, DynamicPooling pooling) {
  const double v = top_motion_magnitude(flows, pooling);
  return make(MetricId::kDynamicDegree,
              kernels::logistic(v, cfg.alpha_dyn, dynamic_threshold(height, width)));
}

RawMetricValue flow_score(std::span<const Image> flows) {
  if (flows.empty()) throw SampleSizeError("flow_score: no flow fields");
  double sum = 0.0;
  for (const auto& f : flows) {
    const auto mags = flow_magnitudes(f);
    sum += mean_of(mags);
  }
  return make(MetricId::kFlowScore, sum / static_cast<double>(flows.size()));
}

double motion_smoothness_from_terms(std::span<const SmoothnessTerm> terms) {
  if (terms.empty()) throw SampleSizeError("motion_smoothness: no interpolated frames");
  double sum = 0.0;
  for (const auto& t : terms) sum += t.ssim * std::log1p(t.diff);
  return sum / static_cast<double>(terms.size());
}

std::size_t interpolation_count(std::size_t frame_count) {
  return frame_count == 0 ? 0 : (frame_count - 1) / 2;
}

std::vector<SmoothnessTerm> motion_smoothness_terms(std::span<const Image> frames,
                                                    std::span<const Image> interpolated) {
  const std::size_t n = interpolation_count(frames.size());
  if (interpolated.size() != n) {
    throw ShapeError("motion_smoothness: " + std::to_string(interpolated.size()) +
                     " interpolated frames, expected " + std::to_string(n));
  }
  if (n == 0) throw SampleSizeError("motion_smoothness: clip too short to interpolate");
  std::vector<SmoothnessTerm> terms;
  terms.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Image& prev = frames[2 * k];
    const Image& mid = frames[2 * k + 1];
    const Image& next = frames[2 * k + 2];
    const Image& pred = interpolated[k];
    require_same_plane(pred, mid, "motion_smoothness");
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < prev.data.size(); ++i) {
      abs_sum += std::abs(static_cast<double>(prev.data[i]) - static_cast<double>(next.data[i]));
    }
    const double diff = 255.0 * abs_sum / static_cast<double>(prev.data.size());
    terms.push_back({kernels::ssim(kernels::to_gray(pred), kernels::to_gray(mid)), diff});
  }
  return terms;
}

RawMetricValue motion_smoothness(std::span<const Image> frames, std::span<const Image> interpolated) {
  const auto terms = motion_smoothness_terms(frames, interpolated);
  return make(MetricId::kMotionSmoothness, motion_smoothness_from_terms(terms));
}

double consistency_raw(const std::vector<std::vector<double>>& track) {
  if (track.size() < 2) throw SampleSizeError("consistency: need at least 2 frames");
  double sum = 0.0;
  for (std::size_t t = 1; t < track.size(); ++t) {
    const double to_first = std::max(0.0, kernels::cosine(track[t], track.front()));
    const double to_prev = std::max(0.0, kernels::cosine(track[t], track[t - 1]));
    sum += 0.5 * (to_first + to_prev);
  }
  return sum / static_cast<double>(track.size() - 1);
}

RawMetricValue subject_consistency(const std::vector<std::vector<double>>& track, double s_dyn,
                                   const DynamicPenaltyConfig& cfg) {
  return consistency(MetricId::kSubjectConsistency, track, s_dyn, cfg);
}

RawMetricValue background_consistency(const std::vector<std::vector<double>>& track, double s_dyn,
                                      const DynamicPenaltyConfig& cfg) {
  return consistency(MetricId::kBackgroundConsistency, track, s_dyn, cfg);
}

double photometric_error(std::span<const Image> frames, std::span<const Image> flow_fwd,
                         std::span<const Image> flow_bwd) {
  if (frames.size() < 2) throw SampleSizeError("photometric_consistency: need at least 2 frames");
  if (flow_fwd.size() != frames.size() - 1 || flow_bwd.size() != frames.size() - 1) {
    throw ShapeError("photometric_consistency: expected T-1 forward and backward flows");
  }
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < frames.size(); ++t) {
    const Image& frame = frames[t];
    const Image round_trip = kernels::warp(kernels::warp(frame, flow_fwd[t]), flow_bwd[t]);
    double residual = 0.0;
    for (std::size_t p = 0; p < frame.pixel_count(); ++p) {
      double sq = 0.0;
      for (std::size_t c = 0; c < frame.channels; ++c) {
        const double d = static_cast<double>(round_trip.data[p * frame.channels + c]) -
                         static_cast<double>(frame.data[p * frame.channels + c]);
        sq += d * d;
      }
      residual += std::sqrt(sq);
    }
    total += residual / static_cast<double>(frame.pixel_count());
  }
  return total / static_cast<double>(frames.size() - 1);
}

RawMetricValue photometric_consistency(std::span<const Image> frames,
                                       std::span<const Image> flow_fwd,
                                       std::span<const Image> flow_bwd, double s_dyn,
                                       const DynamicPenaltyConfig& cfg) {
  const double e = photometric_error(frames, flow_fwd, flow_bwd);
  return make(MetricId::kPhotometricConsistency,
              cfg.penalty(s_dyn) / std::max(e, kReciprocalGuard));
}

std::vector<Point2> trajectory_from_detections(const DetectionTrack& track, double conf_threshold) {
  if (track.empty()) throw SampleSizeError("trajectory: empty detection track");
  // NMS never suppresses the highest-scoring box, so the best box above the
  // confidence threshold is the surviving track point for the frame.
  std::vector<std::optional<Point2>> centers(track.size());
  for (std::size_t t = 0; t < track.size(); ++t) {
    const DetectionBox* best = nullptr;
    for (const auto& box : track[t]) {
      if (!(box.conf >= 0.0 && box.conf <= 1.0)) {
        throw RangeError("trajectory: detection confidence outside [0, 1]");
      }
      if (box.conf < conf_threshold) continue;
      if (best == nullptr || box.conf > best->conf) best = &box;
    }
    if (best != nullptr) centers[t] = best->center();
  }

  std::vector<std::size_t> valid;
  for (std::size_t t = 0; t < centers.size(); ++t) {
    if (centers[t]) valid.push_back(t);
  }
  if (valid.empty()) throw DegenerateInputError("trajectory: no valid detections in track");

  std::vector<Point2> points(track.size());
  for (std::size_t t = 0; t < valid.front(); ++t) points[t] = *centers[valid.front()];
  for (std::size_t t = valid.back(); t < track.size(); ++t) points[t] = *centers[valid.back()];
  for (std::size_t v = 0; v + 1 < valid.size(); ++v) {
    const std::size_t prev = valid[v];
    const std::size_t next = valid[v + 1];
    const Point2 a = *centers[prev];
    const Point2 b = *centers[next];
    for (std::size_t t = prev; t <= next; ++t) {
      const double alpha = static_cast<double>(t - prev) / static_cast<double>(next - prev);
      points[t] = {(1.0 - alpha) * a.x + alpha * b.x, (1.0 - alpha) * a.y + alpha * b.y};
    }
  }
  return points;
}

RawMetricValue trajectory_accuracy_from_points(std::span<const Point2> gt,
                                               std::span<const Point2> generated) {
  const double d = kernels::ndtw(gt, generated);
  return make(MetricId::kTrajectoryAccuracy, 1.0 / std::max(d, kReciprocalGuard));
}

RawMetricValue trajectory_accuracy(const DetectionTrack& gt, const DetectionTrack& generated,
                                   double conf_threshold) {
  const auto r = trajectory_from_detections(gt, conf_threshold);
  const auto p = trajectory_from_detections(generated, conf_threshold);
  return trajectory_accuracy_from_points(r, p);
}

std::vector<std::size_t> uniform_indices(std::size_t count, std::size_t samples) {
  if (count == 0 || samples == 0) return {};
  samples = std::min(samples, count);
  if (samples == 1) return {0};
  std::vector<std::size_t> idx(samples);
  const std::size_t span = count - 1;
  const std::size_t steps = samples - 1;
  for (std::size_t k = 0; k < samples; ++k) {
    // round(k * span / steps), half away from zero, in integers
    idx[k] = (2 * k * span + steps) / (2 * steps);
  }
  return idx;
}

RawMetricValue depth_accuracy(std::span<const Image> generated, std::span<const Image> gt,
                              const DepthConfig& cfg) {
  if (generated.empty() || gt.empty()) throw SampleSizeError("depth_accuracy: empty depth stack");
  const std::size_t samples = std::min({cfg.target_frames, generated.size(), gt.size()});
  const auto gen_idx = uniform_indices(generated.size(), samples);
  const auto gt_idx = uniform_indices(gt.size(), samples);

  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Image& g = generated[gen_idx[k]];
    const Image& r = gt[gt_idx[k]];
    require_same_plane(g, r, "depth_accuracy");
    std::vector<double> gen_vals;
    std::vector<double> gt_vals;
    for (std::size_t p = 0; p < r.pixel_count(); ++p) {
      const double dg = g.data[p];
      const double dr = r.data[p];
      if (!std::isfinite(dg) || !std::isfinite(dr) || dr < cfg.mask_min_depth) continue;
      gen_vals.push_back(dg);
      gt_vals.push_back(dr);
    }
    if (gt_vals.empty()) continue;
    const double m_gen = kernels::median(gen_vals);
    if (!(m_gen > 0.0)) continue;
    const double scale = kernels::median(gt_vals) / m_gen;
    double err = 0.0;
    for (std::size_t i = 0; i < gt_vals.size(); ++i) {
      err += std::abs(scale * gen_vals[i] - gt_vals[i]) / (gt_vals[i] + cfg.epsilon);
    }
    total += err / static_cast<double>(gt_vals.size());
    ++used;
  }
  if (used == 0) throw DegenerateInputError("depth_accuracy: no frame has a valid depth mask");
  return make(MetricId::kDepthAccuracy, total / static_cast<double>(used));
}

RawMetricValue semantic_alignment(std::span<const double> generated, std::span<const double> gt,
                                  double weight) {
  return make(MetricId::kSemanticAlignment,
              weight * std::max(0.0, kernels::cosine(generated, gt)));
}

RawMetricValue action_following(const std::vector<std::vector<double>>& variants) {
  if (variants.size() < 2) throw SampleSizeError("action_following: need at least 2 variants");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    for (std::size_t j = i + 1; j < variants.size(); ++j) {
      sum += 1.0 - std::max(0.0, kernels::cosine(variants[i], variants[j]));
      ++pairs;
    }
  }
  return make(MetricId::kActionFollowing, std::clamp(sum / static_cast<double>(pairs), 0.0, 1.0));
}

double likert_to_unit(int score) {
  if (score < 1 || score > 5) {
    throw RangeError("likert score " + std::to_string(score) + " outside 1..5");
  }
  return (score - 1) / 4.0;
}

RawMetricValue interaction_quality(const JudgeVerdict& verdict) {
  return make(MetricId::kInteractionQuality, verdict_unit(verdict, verdict.interaction_quality));
}

RawMetricValue perspectivity(const JudgeVerdict& verdict) {
  return make(MetricId::kPerspectivity, verdict_unit(verdict, verdict.perspectivity));
}

RawMetricValue instruction_following(const JudgeVerdict& verdict) {
  return make(MetricId::kInstructionFollowing, verdict_unit(verdict, verdict.instruction_following));
}

}  // namespace metrics
}  // namespace ewm
