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
#include "ewm/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ewm/error.hpp"

namespace ewm {
namespace fs = std::filesystem;
namespace {

constexpr std::array<std::string_view, 12> kArtifactKeys = {
    "frames",      "flow_fwd",     "flow_bwd",       "depth",      "appearance_track",
    "scene_track", "st_embedding", "frame_scores",   "desc_embedding", "detections",
    "judge",       "interpolated",
};

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

void write_json(const nlohmann::json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failure on " + path.string());
}

std::string require_string(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ValidationError(where + ": \"" + key + "\" must be a string");
  }
  return j.at(key).get<std::string>();
}

std::size_t require_count(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
    throw ValidationError(where + ": \"" + key + "\" must be a non-negative integer");
  }
  return j.at(key).get<std::size_t>();
}

std::string dims_string(const std::vector<std::uint64_t>& dims) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  os << ')';
  return os.str();
}

// Expected shape for tensor artifacts; 0 marks a free axis.
struct ShapeRule {
  DType dtype;
  std::vector<std::uint64_t> dims;
};

std::optional<ShapeRule> shape_rule(const VideoManifest& m, ArtifactKind kind) {
  const std::uint64_t t = m.frame_count;
  const std::uint64_t h = m.height;
  const std::uint64_t w = m.width;
  switch (kind) {
    case ArtifactKind::kFrames:
      return ShapeRule{DType::kUInt8, {t, h, w, 3}};
    case ArtifactKind::kFlowFwd:
    case ArtifactKind::kFlowBwd:
      return ShapeRule{DType::kFloat32, {t - 1, h, w, 2}};
    case ArtifactKind::kDepth:
      return ShapeRule{DType::kFloat32, {0, h, w}};
    case ArtifactKind::kAppearanceTrack:
    case ArtifactKind::kSceneTrack:
      return ShapeRule{DType::kFloat32, {t, 0}};
    case ArtifactKind::kStEmbedding:
    case ArtifactKind::kDescEmbedding:
      return ShapeRule{DType::kFloat32, {1, 0}};
    case ArtifactKind::kFrameScores:
      return ShapeRule{DType::kFloat32, {t, 2}};
    case ArtifactKind::kInterpolated:
      return ShapeRule{DType::kUInt8, {metrics::interpolation_count(m.frame_count), h, w, 3}};
    case ArtifactKind::kDetections:
    case ArtifactKind::kJudge:
      return std::nullopt;
  }
  return std::nullopt;
}

void check_shape(const VideoManifest& m, ArtifactKind kind, const TensorHeader& header) {
  const auto rule = shape_rule(m, kind);
  if (!rule) return;
  const auto where = m.video_id + "/" + std::string(artifact_key(kind));
  if (header.dtype != rule->dtype) {
    throw ShapeError(where + ": dtype " + std::string(dtype_name(header.dtype)) + ", expected " +
                     std::string(dtype_name(rule->dtype)));
  }
  bool ok = header.dims.size() == rule->dims.size();
  for (std::size_t i = 0; ok && i < rule->dims.size(); ++i) {
    ok = rule->dims[i] == 0 || rule->dims[i] == header.dims[i];
  }
  if (!ok) {
    std::string expected = "(";
    for (std::size_t i = 0; i < rule->dims.size(); ++i) {
      expected += (i ? "," : "") + (rule->dims[i] == 0 ? std::string("*") : std::to_string(rule->dims[i]));
    }
    expected += ')';
    throw ShapeError(where + ": shape " + dims_string(header.dims) + ", expected " + expected);
  }
}

std::vector<Image> planes(const TensorRecord& rec, std::size_t channels_axis_present) {
  // rec is (N, H, W[, C]); returns N images.
  const std::size_t n = rec.dim(0);
  const std::size_t h = rec.dim(1);
  const std::size_t w = rec.dim(2);
  const std::size_t c = channels_axis_present ? rec.dim(3) : 1;
  const std::size_t stride = h * w * c;
  std::vector<Image> out;
  out.reserve(n);
  if (rec.dtype() == DType::kUInt8) {
    const auto data = rec.bytes();
    for (std::size_t i = 0; i < n; ++i) {
      Image img(h, w, c);
      for (std::size_t k = 0; k < stride; ++k) {
        img.data[k] = static_cast<float>(data[i * stride + k]) / 255.0f;
      }
      out.push_back(std::move(img));
    }
  } else {
    const auto data = rec.floats();
    for (std::size_t i = 0; i < n; ++i) {
      Image img(h, w, c);
      std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(i * stride), stride, img.data.begin());
      out.push_back(std::move(img));
    }
  }
  return out;
}

TensorRecord load_checked(const VideoManifest& m, ArtifactKind kind) {
  if (!m.references(kind)) {
    throw ArtifactMissingError(m.video_id + ": artifact " + std::string(artifact_key(kind)) +
                               " not referenced");
  }
  const auto path = m.resolve(kind);
  if (!fs::exists(path)) {
    throw ArtifactMissingError(m.video_id + ": " + path.string() + " does not exist");
  }
  auto rec = read_tensor(path);
  check_shape(m, kind, rec.header());
  return rec;
}

void add_missing(MetricReadiness& r, const std::string& what) {
  if (std::find(r.missing.begin(), r.missing.end(), what) == r.missing.end()) {
    r.missing.push_back(what);
  }
}

}  // namespace

std::string_view role_name(VideoRole role) {
  return role == VideoRole::kGenerated ? "generated" : "ground_truth";
}

std::string_view artifact_key(ArtifactKind kind) { return kArtifactKeys[static_cast<std::size_t>(kind)]; }

std::optional<ArtifactKind> parse_artifact_key(std::string_view key) {
  for (std::size_t i = 0; i < kArtifactKeys.size(); ++i) {
    if (kArtifactKeys[i] == key) return static_cast<ArtifactKind>(i);
  }
  return std::nullopt;
}

fs::path VideoManifest::resolve(ArtifactKind kind) const { return directory / artifacts.at(kind); }

void VideoManifest::validate() const {
  const auto where = "manifest " + (video_id.empty() ? std::string("<unnamed>") : video_id);
  if (video_id.empty()) throw ValidationError(where + ": video_id is empty");
  if (model_id.empty()) throw ValidationError(where + ": model_id is empty");
  if (frame_count < kMinFrames) throw ValidationError(where + ": T must be >= 2");
  if (height < kMinSide || width < kMinSide) throw ValidationError(where + ": H and W must be >= 16");
  if (role == VideoRole::kGroundTruth && gt_ref) {
    throw ValidationError(where + ": ground_truth videos cannot carry gt_ref");
  }
}

nlohmann::json VideoManifest::to_json() const {
  nlohmann::json j;
  j["video_id"] = video_id;
  j["model_id"] = model_id;
  j["task_id"] = task_id;
  j["instruction"] = instruction;
  j["role"] = role_name(role);
  nlohmann::json frames = {{"T", frame_count}, {"H", height}, {"W", width}};
  frames["path"] = references(ArtifactKind::kFrames)
                       ? nlohmann::json(artifacts.at(ArtifactKind::kFrames).generic_string())
                       : nlohmann::json(nullptr);
  j["frames"] = frames;
  for (auto kind : kAllArtifacts) {
    if (kind == ArtifactKind::kFrames) continue;
    const auto key = std::string(artifact_key(kind));
    j[key] = references(kind) ? nlohmann::json(artifacts.at(kind).generic_string())
                              : nlohmann::json(nullptr);
  }
  j["gt_ref"] = gt_ref ? nlohmann::json(*gt_ref) : nlohmann::json(nullptr);
  return j;
}

VideoManifest VideoManifest::from_json(const nlohmann::json& j, fs::path directory) {
  if (!j.is_object()) throw ValidationError("manifest must be a JSON object");
  VideoManifest m;
  m.directory = std::move(directory);
  const std::string where = "manifest in " + m.directory.string();
  m.video_id = require_string(j, "video_id", where);
  m.model_id = require_string(j, "model_id", where);
  m.task_id = require_string(j, "task_id", where);
  m.instruction = require_string(j, "instruction", where);
  const auto role = require_string(j, "role", where);
  if (role == "generated") {
    m.role = VideoRole::kGenerated;
  } else if (role == "ground_truth") {
    m.role = VideoRole::kGroundTruth;
  } else {
    throw ValidationError(where + ": role must be generated or ground_truth");
  }
  if (!j.contains("frames") || !j.at("frames").is_object()) {
    throw ValidationError(where + ": \"frames\" must be an object");
  }
  const auto& frames = j.at("frames");
  m.frame_count = require_count(frames, "T", where);
  m.height = require_count(frames, "H", where);
  m.width = require_count(frames, "W", where);
  if (frames.contains("path") && frames.at("path").is_string()) {
    m.artifacts[ArtifactKind::kFrames] = frames.at("path").get<std::string>();
  }
  for (auto kind : kAllArtifacts) {
    if (kind == ArtifactKind::kFrames) continue;
    const auto key = std::string(artifact_key(kind));
    if (!j.contains(key) || j.at(key).is_null()) continue;
    if (!j.at(key).is_string()) throw ValidationError(where + ": \"" + key + "\" must be a path");
    m.artifacts[kind] = j.at(key).get<std::string>();
  }
  if (j.contains("gt_ref") && !j.at("gt_ref").is_null()) {
    m.gt_ref = require_string(j, "gt_ref", where);
  }
  m.validate();
  return m;
}

nlohmann::json PersistedVerdict::to_json() const {
  return {{"kind", kind}, {"request_digest", request_digest}, {"raw_response", raw_response},
          {"parsed", parsed}};
}

PersistedVerdict PersistedVerdict::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("judge.json must be an object");
  PersistedVerdict v;
  v.kind = require_string(j, "kind", "judge.json");
  v.request_digest = require_string(j, "request_digest", "judge.json");
  v.raw_response = require_string(j, "raw_response", "judge.json");
  if (j.contains("parsed")) v.parsed = j.at("parsed");
  return v;
}

DetectionTrack parse_detections(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("detections: expected an array of frames");
  DetectionTrack track;
  track.reserve(j.size());
  for (const auto& frame : j) {
    if (!frame.is_array()) throw FormatError("detections: each frame must be an array of boxes");
    auto& boxes = track.emplace_back();
    for (const auto& det : frame) {
      if (!det.is_object() || !det.contains("box") || !det.contains("conf")) {
        throw FormatError("detections: entries need \"box\" and \"conf\"");
      }
      const auto& box = det.at("box");
      if (!box.is_array() || box.size() != 4 || !det.at("conf").is_number()) {
        throw FormatError("detections: box must be [x0,y0,x1,y1] and conf a number");
      }
      DetectionBox b{box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
                     box[3].get<double>(), det.at("conf").get<double>()};
      if (!(b.conf >= 0.0 && b.conf <= 1.0)) throw RangeError("detections: conf outside [0, 1]");
      boxes.push_back(b);
    }
  }
  return track;
}

nlohmann::json detections_to_json(const DetectionTrack& track) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& frame : track) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : frame) {
      boxes.push_back({{"box", {b.x0, b.y0, b.x1, b.y1}}, {"conf", b.conf}});
    }
    j.push_back(std::move(boxes));
  }
  return j;
}

const VideoManifest* EvaluationBundle::find(std::string_view video_id) const {
  const auto it = by_id_.find(video_id);
  return it == by_id_.end() ? nullptr : &videos_[it->second];
}

const VideoManifest* EvaluationBundle::ground_truth_for(const VideoManifest& video) const {
  if (!video.gt_ref) return nullptr;
  const auto* gt = find(*video.gt_ref);
  return gt != nullptr && gt->role == VideoRole::kGroundTruth ? gt : nullptr;
}

std::vector<std::string> EvaluationBundle::models() const {
  std::set<std::string> ids;
  for (const auto& v : videos_) {
    if (v.role == VideoRole::kGenerated) ids.insert(v.model_id);
  }
  return {ids.begin(), ids.end()};
}

std::vector<const VideoManifest*> EvaluationBundle::generated_videos(std::string_view model_id) const {
  std::vector<const VideoManifest*> out;
  for (const auto& v : videos_) {
    if (v.role == VideoRole::kGenerated && v.model_id == model_id) out.push_back(&v);
  }
  return out;
}

bool EvaluationBundle::available(const VideoManifest& video, ArtifactKind kind) const {
  if (kind == ArtifactKind::kJudge) return fs::exists(verdict_path(video));
  return video.references(kind) && fs::exists(video.resolve(kind));
}

std::vector<Image> EvaluationBundle::load_frames(const VideoManifest& video) const {
  return planes(load_checked(video, ArtifactKind::kFrames), 1);
}

TensorRecord EvaluationBundle::load_frames_raw(const VideoManifest& video) const {
  return load_checked(video, ArtifactKind::kFrames);
}

std::vector<Image> EvaluationBundle::load_flow(const VideoManifest& video, ArtifactKind kind) const {
  if (kind != ArtifactKind::kFlowFwd && kind != ArtifactKind::kFlowBwd) {
    throw ValidationError("load_flow: not a flow artifact");
  }
  return planes(load_checked(video, kind), 1);
}

std::vector<Image> EvaluationBundle::load_depth(const VideoManifest& video) const {
  return planes(load_checked(video, ArtifactKind::kDepth), 0);
}

std::vector<Image> EvaluationBundle::load_interpolated(const VideoManifest& video) const {
  return planes(load_checked(video, ArtifactKind::kInterpolated), 1);
}

std::vector<std::vector<double>> EvaluationBundle::load_track(const VideoManifest& video,
                                                              ArtifactKind kind) const {
  const auto rec = load_checked(video, kind);
  const auto rows = rec.dim(0);
  const auto cols = rec.dim(1);
  const auto data = rec.floats();
  std::vector<std::vector<double>> out(rows, std::vector<double>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r][c] = data[r * cols + c];
  }
  return out;
}

std::vector<double> EvaluationBundle::load_embedding(const VideoManifest& video,
                                                     ArtifactKind kind) const {
  auto rows = load_track(video, kind);
  return std::move(rows.front());
}

FrameScores EvaluationBundle::load_frame_scores(const VideoManifest& video) const {
  const auto rows = load_track(video, ArtifactKind::kFrameScores);
  FrameScores scores;
  for (const auto& r : rows) {
    scores.quality.push_back(r[0]);
    scores.aesthetic.push_back(r[1]);
  }
  return scores;
}

DetectionTrack EvaluationBundle::load_detections(const VideoManifest& video) const {
  if (!available(video, ArtifactKind::kDetections)) {
    throw ArtifactMissingError(video.video_id + ": detections not available");
  }
  auto track = parse_detections(read_json(video.resolve(ArtifactKind::kDetections)));
  if (track.size() != video.frame_count) {
    throw ShapeError(video.video_id + "/detections: " + std::to_string(track.size()) +
                     " frames, expected " + std::to_string(video.frame_count));
  }
  return track;
}

std::optional<PersistedVerdict> EvaluationBundle::load_verdict(const VideoManifest& video) const {
  const auto path = verdict_path(video);
  if (!fs::exists(path)) return std::nullopt;
  return PersistedVerdict::from_json(read_json(path));
}

fs::path EvaluationBundle::verdict_path(const VideoManifest& video) const {
  return video.references(ArtifactKind::kJudge) ? video.resolve(ArtifactKind::kJudge)
                                                : video.directory / kVerdictFile;
}

EvaluationBundle load_bundle(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("bundle root is not a directory: " + root.string());
  const auto index_path = root / kIndexFile;
  if (!fs::exists(index_path)) throw IoError("bundle has no " + std::string(kIndexFile));
  const auto index = read_json(index_path);
  if (!index.is_object() || !index.contains("videos") || !index.at("videos").is_array()) {
    throw FormatError("index.json must hold a \"videos\" array of manifest paths");
  }

  EvaluationBundle bundle;
  bundle.root_ = root;
  for (const auto& entry : index.at("videos")) {
    if (!entry.is_string()) throw FormatError("index.json: manifest paths must be strings");
    const auto path = root / entry.get<std::string>();
    bundle.videos_.push_back(VideoManifest::from_json(read_json(path), path.parent_path()));
  }
  std::sort(bundle.videos_.begin(), bundle.videos_.end(),
            [](const auto& a, const auto& b) { return a.video_id < b.video_id; });
  for (std::size_t i = 0; i < bundle.videos_.size(); ++i) {
    if (!bundle.by_id_.emplace(bundle.videos_[i].video_id, i).second) {
      throw ValidationError("duplicate video_id " + bundle.videos_[i].video_id);
    }
  }

  for (const auto& video : bundle.videos_) {
    for (const auto& [kind, rel] : video.artifacts) {
      const auto path = video.resolve(kind);
      if (!fs::exists(path)) continue;  // reported as missing by validation
      if (kind == ArtifactKind::kDetections) {
        bundle.load_detections(video);
      } else if (kind == ArtifactKind::kJudge) {
        bundle.load_verdict(video);
      } else {
        check_shape(video, kind, read_tensor_header(path));
      }
    }
    if (video.gt_ref) {
      const auto* gt = bundle.find(*video.gt_ref);
      if (gt != nullptr && gt->role != VideoRole::kGroundTruth) {
        throw ValidationError(video.video_id + ": gt_ref " + *video.gt_ref +
                              " is not a ground_truth video");
      }
    }
  }

  if (index.contains("action_groups")) {
    for (const auto& g : index.at("action_groups")) {
      ActionGroup group;
      group.model_id = require_string(g, "model_id", "action group");
      group.group_id = require_string(g, "group_id", "action group");
      if (!g.contains("videos") || !g.at("videos").is_array()) {
        throw FormatError("action group " + group.group_id + ": \"videos\" must be an array");
      }
      for (const auto& v : g.at("videos")) {
        const auto id = v.get<std::string>();
        const auto* member = bundle.find(id);
        if (member == nullptr || member->role != VideoRole::kGenerated ||
            member->model_id != group.model_id) {
          throw ValidationError("action group " + group.group_id + ": " + id +
                                " is not a generated video of " + group.model_id);
        }
        group.video_ids.push_back(id);
      }
      bundle.groups_.push_back(std::move(group));
    }
    std::sort(bundle.groups_.begin(), bundle.groups_.end(), [](const auto& a, const auto& b) {
      return std::tie(a.model_id, a.group_id) < std::tie(b.model_id, b.group_id);
    });
  }
  return bundle;
}

void save_manifest(const VideoManifest& manifest, const fs::path& path) {
  manifest.validate();
  write_json(manifest.to_json(), path);
}

void save_index(const fs::path& root, const std::vector<fs::path>& manifest_paths,
                const std::vector<ActionGroup>& groups) {
  nlohmann::json j;
  j["videos"] = nlohmann::json::array();
  for (const auto& p : manifest_paths) j["videos"].push_back(p.generic_string());
  j["action_groups"] = nlohmann::json::array();
  for (const auto& g : groups) {
    j["action_groups"].push_back(
        {{"model_id", g.model_id}, {"group_id", g.group_id}, {"videos", g.video_ids}});
  }
  write_json(j, root / kIndexFile);
}

std::string MetricReadiness::describe() const {
  if (missing.empty()) return "ready";
  std::string out = "missing: ";
  for (std::size_t i = 0; i < missing.size(); ++i) out += (i ? ", " : "") + missing[i];
  return out;
}

bool ValidationReport::all_ready(const std::set<MetricId>& requested) const {
  auto wanted = [&](MetricId id) { return requested.empty() || requested.count(id) != 0; };
  for (const auto& v : videos) {
    for (const auto& [id, r] : v.metrics) {
      if (wanted(id) && !r.ready()) return false;
    }
  }
  for (const auto& m : models) {
    for (const auto& [id, r] : m.metrics) {
      if (wanted(id) && !r.ready()) return false;
    }
  }
  return true;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json j;
  j["ready"] = all_ready();
  j["videos"] = nlohmann::json::array();
  for (const auto& v : videos) {
    nlohmann::json metrics_json = nlohmann::json::object();
    for (const auto& [id, r] : v.metrics) metrics_json[std::string(metric_name(id))] = r.describe();
    j["videos"].push_back({{"video_id", v.video_id}, {"model_id", v.model_id}, {"metrics", metrics_json}});
  }
  j["models"] = nlohmann::json::array();
  for (const auto& m : models) {
    nlohmann::json metrics_json = nlohmann::json::object();
    for (const auto& [id, r] : m.metrics) metrics_json[std::string(metric_name(id))] = r.describe();
    j["models"].push_back({{"model_id", m.model_id}, {"metrics", metrics_json}});
  }
  return j;
}

ValidationReport validate_bundle(const EvaluationBundle& bundle, JudgeAvailability judge) {
  ValidationReport report;
  for (const auto& video : bundle.videos()) {
    if (video.role != VideoRole::kGenerated) continue;
    VideoReadiness vr{video.video_id, video.model_id, {}};
    const auto* gt = bundle.ground_truth_for(video);

    auto need = [&](MetricId id, std::initializer_list<ArtifactKind> own,
                    std::initializer_list<ArtifactKind> reference) {
      auto& r = vr.metrics[id];
      for (auto k : own) {
        if (!bundle.available(video, k)) add_missing(r, std::string(artifact_key(k)));
      }
      if (reference.size() == 0) return;
      if (gt == nullptr) {
        add_missing(r, "ground_truth");
        return;
      }
      for (auto k : reference) {
        if (!bundle.available(*gt, k)) add_missing(r, "gt." + std::string(artifact_key(k)));
      }
    };

    need(MetricId::kImageQuality, {ArtifactKind::kFrameScores}, {});
    need(MetricId::kAestheticQuality, {ArtifactKind::kFrameScores}, {});
    need(MetricId::kDynamicDegree, {ArtifactKind::kFlowFwd}, {});
    need(MetricId::kFlowScore, {ArtifactKind::kFlowFwd}, {});
    need(MetricId::kMotionSmoothness, {ArtifactKind::kFrames, ArtifactKind::kInterpolated}, {});
    need(MetricId::kSubjectConsistency, {ArtifactKind::kAppearanceTrack, ArtifactKind::kFlowFwd}, {});
    need(MetricId::kBackgroundConsistency, {ArtifactKind::kSceneTrack, ArtifactKind::kFlowFwd}, {});
    need(MetricId::kPhotometricConsistency,
         {ArtifactKind::kFrames, ArtifactKind::kFlowFwd, ArtifactKind::kFlowBwd}, {});
    need(MetricId::kTrajectoryAccuracy, {ArtifactKind::kDetections}, {ArtifactKind::kDetections});
    need(MetricId::kDepthAccuracy, {ArtifactKind::kDepth}, {ArtifactKind::kDepth});
    need(MetricId::kSemanticAlignment, {ArtifactKind::kDescEmbedding}, {ArtifactKind::kDescEmbedding});

    const bool has_verdict = bundle.available(video, ArtifactKind::kJudge);
    const bool judge_ok =
        judge == JudgeAvailability::kVerdictOrFrames
            ? has_verdict || bundle.available(video, ArtifactKind::kFrames)
            : judge == JudgeAvailability::kVerdictOnly && has_verdict;
    for (auto id : {MetricId::kInteractionQuality, MetricId::kPerspectivity,
                    MetricId::kInstructionFollowing}) {
      auto& r = vr.metrics[id];
      if (!judge_ok) add_missing(r, "judge");
    }
    report.videos.push_back(std::move(vr));
  }

  for (const auto& model : bundle.models()) {
    ModelReadiness mr{model, {}};
    std::size_t gen_with_embedding = 0;
    std::set<std::string> refs;
    for (const auto* v : bundle.generated_videos(model)) {
      if (bundle.available(*v, ArtifactKind::kStEmbedding)) ++gen_with_embedding;
      const auto* gt = bundle.ground_truth_for(*v);
      if (gt != nullptr && bundle.available(*gt, ArtifactKind::kStEmbedding)) refs.insert(gt->video_id);
    }
    auto& jepa = mr.metrics[MetricId::kJepaSimilarity];
    if (gen_with_embedding < 2) add_missing(jepa, "st_embedding (>=2 generated videos)");
    if (refs.size() < 2) add_missing(jepa, "gt.st_embedding (>=2 reference videos)");

    auto& action = mr.metrics[MetricId::kActionFollowing];
    bool any_group = false;
    bool group_ready = false;
    for (const auto& g : bundle.action_groups()) {
      if (g.model_id != model) continue;
      any_group = true;
      bool ok = g.video_ids.size() >= 2;
      for (const auto& id : g.video_ids) ok = ok && bundle.available(*bundle.find(id), ArtifactKind::kSceneTrack);
      group_ready = group_ready || ok;
    }
    if (!any_group) {
      add_missing(action, "action_group");
    } else if (!group_ready) {
      add_missing(action, "scene_track (action group members)");
    }
    report.models.push_back(std::move(mr));
  }
  return report;
}

}  // namespace ewm
