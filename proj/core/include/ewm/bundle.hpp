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
#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ewm/judge.hpp"
#include "ewm/kernels.hpp"
#include "ewm/metric_ids.hpp"
#include "ewm/metrics.hpp"
#include "ewm/tensor.hpp"

namespace ewm {

enum class VideoRole : std::uint8_t { kGenerated, kGroundTruth };

std::string_view role_name(VideoRole role);

/// Per-video artifact kinds; the string form is the manifest key.
enum class ArtifactKind : std::uint8_t {
  kFrames,
  kFlowFwd,
  kFlowBwd,
  kDepth,
  kAppearanceTrack,
  kSceneTrack,
  kStEmbedding,
  kFrameScores,
  kDescEmbedding,
  kDetections,
  kJudge,
  kInterpolated,
};

inline constexpr std::array<ArtifactKind, 12> kAllArtifacts = {
    ArtifactKind::kFrames,          ArtifactKind::kFlowFwd,     ArtifactKind::kFlowBwd,
    ArtifactKind::kDepth,           ArtifactKind::kAppearanceTrack, ArtifactKind::kSceneTrack,
    ArtifactKind::kStEmbedding,     ArtifactKind::kFrameScores, ArtifactKind::kDescEmbedding,
    ArtifactKind::kDetections,      ArtifactKind::kJudge,       ArtifactKind::kInterpolated,
};

std::string_view artifact_key(ArtifactKind kind);
std::optional<ArtifactKind> parse_artifact_key(std::string_view key);

inline constexpr std::size_t kMinFrames = 2;
inline constexpr std::size_t kMinSide = 16;

struct VideoManifest {
  std::string video_id;
  std::string model_id;
  std::string task_id;
  std::string instruction;
  VideoRole role = VideoRole::kGenerated;
  std::size_t frame_count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  /// Paths relative to `directory`.
  std::map<ArtifactKind, std::filesystem::path> artifacts;
  std::optional<std::string> gt_ref;
  /// Directory holding the manifest; not serialised.
  std::filesystem::path directory;

  bool references(ArtifactKind kind) const { return artifacts.count(kind) != 0; }
  std::filesystem::path resolve(ArtifactKind kind) const;
  /// Throws ValidationError on a broken invariant.
  void validate() const;

  nlohmann::json to_json() const;
  static VideoManifest from_json(const nlohmann::json& j, std::filesystem::path directory);
};

/// Videos generated from N distinct instructions for the same scene.
struct ActionGroup {
  std::string model_id;
  std::string group_id;
  std::vector<std::string> video_ids;
};

struct FrameScores {
  std::vector<double> quality;    // 0..100
  std::vector<double> aesthetic;  // 0..10
};

/// Contents of a per-video judge.json.
struct PersistedVerdict {
  std::string kind;
  std::string request_digest;
  std::string raw_response;
  nlohmann::json parsed;

  nlohmann::json to_json() const;
  static PersistedVerdict from_json(const nlohmann::json& j);
};

class EvaluationBundle {
 public:
  const std::filesystem::path& root() const { return root_; }
  /// Sorted by video_id.
  const std::vector<VideoManifest>& videos() const { return videos_; }
  const std::vector<ActionGroup>& action_groups() const { return groups_; }
  const VideoManifest* find(std::string_view video_id) const;
  /// Ground-truth counterpart of a generated video, if indexed.
  const VideoManifest* ground_truth_for(const VideoManifest& video) const;
  /// Sorted model ids owning at least one generated video.
  std::vector<std::string> models() const;
  std::vector<const VideoManifest*> generated_videos(std::string_view model_id) const;

  /// True when the artifact is referenced and its file exists on disk.
  bool available(const VideoManifest& video, ArtifactKind kind) const;

  std::vector<Image> load_frames(const VideoManifest& video) const;
  TensorRecord load_frames_raw(const VideoManifest& video) const;
  std::vector<Image> load_flow(const VideoManifest& video, ArtifactKind kind) const;
  std::vector<Image> load_depth(const VideoManifest& video) const;
  std::vector<Image> load_interpolated(const VideoManifest& video) const;
  std::vector<std::vector<double>> load_track(const VideoManifest& video, ArtifactKind kind) const;
  std::vector<double> load_embedding(const VideoManifest& video, ArtifactKind kind) const;
  FrameScores load_frame_scores(const VideoManifest& video) const;
  DetectionTrack load_detections(const VideoManifest& video) const;
  std::optional<PersistedVerdict> load_verdict(const VideoManifest& video) const;
  /// Where a live judge run persists the verdict for this video.
  std::filesystem::path verdict_path(const VideoManifest& video) const;

 private:
  friend EvaluationBundle load_bundle(const std::filesystem::path& root);

  std::filesystem::path root_;
  std::vector<VideoManifest> videos_;
  std::vector<ActionGroup> groups_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

inline constexpr std::string_view kIndexFile = "index.json";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kVerdictFile = "judge.json";

/// Parses the index and every manifest, checking tensor headers (and the
/// detection/verdict JSON) against each manifest's T, H, W. Payloads are
/// loaded lazily. Shape mismatches throw ShapeError.
EvaluationBundle load_bundle(const std::filesystem::path& root);

DetectionTrack parse_detections(const nlohmann::json& j);
nlohmann::json detections_to_json(const DetectionTrack& track);

/// Writers used by extractors and test fixtures.
void save_manifest(const VideoManifest& manifest, const std::filesystem::path& path);
void save_index(const std::filesystem::path& root,
                const std::vector<std::filesystem::path>& manifest_paths,
                const std::vector<ActionGroup>& groups);

/// How judge metrics may be satisfied during validation.
enum class JudgeAvailability : std::uint8_t {
  kVerdictOrFrames,  // replayable verdict or frames a live judge can see
  kVerdictOnly,
  kNone,
};

struct MetricReadiness {
  std::vector<std::string> missing;  // empty == ready
  bool ready() const { return missing.empty(); }
  std::string describe() const;
};

struct VideoReadiness {
  std::string video_id;
  std::string model_id;
  std::map<MetricId, MetricReadiness> metrics;  // per-video metrics only
};

struct ModelReadiness {
  std::string model_id;
  std::map<MetricId, MetricReadiness> metrics;  // corpus metrics only
};

struct ValidationReport {
  std::vector<VideoReadiness> videos;
  std::vector<ModelReadiness> models;

  /// All requested metrics ready everywhere (empty request == all 16).
  bool all_ready(const std::set<MetricId>& requested = {}) const;
  nlohmann::json to_json() const;
};

ValidationReport validate_bundle(const EvaluationBundle& bundle,
                                 JudgeAvailability judge = JudgeAvailability::kVerdictOrFrames);

}  // namespace ewm
