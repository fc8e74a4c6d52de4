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

#include <nlohmann/json.hpp>

#include "ewm/bundle.hpp"
#include "ewm/error.hpp"
#include "support/synthetic.hpp"

namespace ewm {
namespace {

namespace fs = std::filesystem;
using testing::ScratchDir;

// One generated video with nothing but per-frame scores.
fs::path write_scores_only(const fs::path& root, const std::string& id, std::size_t t = 4) {
  VideoManifest m;
  m.video_id = id;
  m.model_id = "scores-model";
  m.task_id = "t";
  m.instruction = "push the block";
  m.frame_count = t;
  m.height = 16;
  m.width = 16;
  const auto rel = fs::path("videos") / id;
  fs::create_directories(root / rel);
  std::vector<float> vals;
  for (std::size_t i = 0; i < t; ++i) {
    vals.push_back(50.0f);
    vals.push_back(5.0f);
  }
  write_tensor(TensorRecord({t, 2}, vals), root / rel / "frame_scores.wabt");
  m.artifacts[ArtifactKind::kFrameScores] = "frame_scores.wabt";
  save_manifest(m, root / rel / kManifestFile);
  return rel / kManifestFile;
}

const MetricReadiness& readiness(const ValidationReport& r, const std::string& video, MetricId id) {
  for (const auto& v : r.videos) {
    if (v.video_id == video) return v.metrics.at(id);
  }
  throw std::runtime_error("no video " + video);
}

TEST(Bundle, SyntheticLoadsAndIsReady) {
  ScratchDir dir;
  testing::write_synthetic_bundle(dir.path());
  const auto b = load_bundle(dir.path());
  EXPECT_EQ(b.videos().size(), 15u);
  EXPECT_EQ(b.models(), (std::vector<std::string>{"model-a", "model-b"}));
  EXPECT_EQ(b.generated_videos("model-a").size(), 5u);
  EXPECT_EQ(b.action_groups().size(), 2u);
  for (std::size_t i = 1; i < b.videos().size(); ++i) {
    EXPECT_LT(b.videos()[i - 1].video_id, b.videos()[i].video_id);
  }
  const auto* v = b.find("model-a-0");
  ASSERT_NE(v, nullptr);
  const auto* gt = b.ground_truth_for(*v);
  ASSERT_NE(gt, nullptr);
  EXPECT_EQ(gt->video_id, "gt-task0");

  const auto report = validate_bundle(b);
  EXPECT_TRUE(report.all_ready());
  EXPECT_EQ(report.videos.size(), 10u);
  for (const auto& vr : report.videos) EXPECT_EQ(vr.metrics.size(), 14u);
  for (const auto& mr : report.models) EXPECT_EQ(mr.metrics.size(), 2u);

  const auto frames = b.load_frames(*v);
  EXPECT_EQ(frames.size(), 9u);
  EXPECT_EQ(frames[0].channels, 3u);
  EXPECT_EQ(b.load_flow(*v, ArtifactKind::kFlowFwd).size(), 8u);
  EXPECT_EQ(b.load_interpolated(*v).size(), 4u);
  EXPECT_EQ(b.load_frame_scores(*v).quality.size(), 9u);
  EXPECT_EQ(b.load_detections(*v).size(), 9u);
  EXPECT_TRUE(b.load_verdict(*v).has_value());
}

TEST(Bundle, LoadIsDeterministic) {
  ScratchDir dir;
  testing::write_synthetic_bundle(dir.path());
  const auto a = load_bundle(dir.path());
  const auto b = load_bundle(dir.path());
  ASSERT_EQ(a.videos().size(), b.videos().size());
  for (std::size_t i = 0; i < a.videos().size(); ++i) {
    EXPECT_EQ(a.videos()[i].to_json(), b.videos()[i].to_json());
  }
  EXPECT_EQ(validate_bundle(a).to_json(), validate_bundle(b).to_json());
}

TEST(Bundle, ScoresOnlyBundle) {
  ScratchDir dir;
  save_index(dir.path(), {write_scores_only(dir.path(), "v0")}, {});
  const auto b = load_bundle(dir.path());
  const auto report = validate_bundle(b, JudgeAvailability::kNone);
  EXPECT_TRUE(report.all_ready({MetricId::kImageQuality, MetricId::kAestheticQuality}));
  EXPECT_FALSE(report.all_ready());
  for (const auto& [id, r] : report.videos.at(0).metrics) {
    const bool expected = id == MetricId::kImageQuality || id == MetricId::kAestheticQuality;
    EXPECT_EQ(r.ready(), expected) << metric_name(id);
  }
  EXPECT_EQ(readiness(report, "v0", MetricId::kDepthAccuracy).describe(), "missing: depth, ground_truth");
}

TEST(Bundle, FiveHundredVideoSplit) {
  ScratchDir dir;
  std::vector<fs::path> manifests;
  for (int i = 0; i < 500; ++i) {
    manifests.push_back(write_scores_only(dir.path(), "test-" + std::to_string(1000 + i), 2));
  }
  save_index(dir.path(), manifests, {});
  const auto b = load_bundle(dir.path());
  EXPECT_EQ(b.videos().size(), 500u);
  EXPECT_EQ(b.generated_videos("scores-model").size(), 500u);
}

TEST(Bundle, MissingDepthIsFlagged) {
  ScratchDir dir;
  testing::SyntheticOptions o;
  o.omit = {ArtifactKind::kDepth};
  testing::write_synthetic_bundle(dir.path(), o);
  const auto report = validate_bundle(load_bundle(dir.path()));
  const auto& r = readiness(report, "model-a-1", MetricId::kDepthAccuracy);
  EXPECT_EQ(r.describe(), "missing: depth");
  EXPECT_TRUE(readiness(report, "model-a-1", MetricId::kFlowScore).ready());
  EXPECT_FALSE(report.all_ready());
  EXPECT_FALSE(report.all_ready({MetricId::kDepthAccuracy}));
  EXPECT_TRUE(report.all_ready({MetricId::kFlowScore, MetricId::kSemanticAlignment}));
  const auto j = report.to_json();
  EXPECT_NE(j.dump().find("depth_accuracy"), std::string::npos);
}

TEST(Bundle, NoGroundTruthFlagsReferenceMetrics) {
  ScratchDir dir;
  testing::write_synthetic_bundle(dir.path());
  const auto path = dir / "videos/model-a-2/manifest.json";
  auto j = nlohmann::json::parse(testing::read_file(path));
  j["gt_ref"] = nullptr;
  testing::write_file(path, j.dump());
  const auto report = validate_bundle(load_bundle(dir.path()));
  for (auto id : {MetricId::kSemanticAlignment, MetricId::kTrajectoryAccuracy,
                  MetricId::kDepthAccuracy}) {
    const auto& r = readiness(report, "model-a-2", id);
    EXPECT_FALSE(r.ready()) << metric_name(id);
    EXPECT_NE(r.describe().find("ground_truth"), std::string::npos);
  }
  for (auto id : {MetricId::kImageQuality, MetricId::kFlowScore, MetricId::kMotionSmoothness,
                  MetricId::kPhotometricConsistency, MetricId::kInteractionQuality}) {
    EXPECT_TRUE(readiness(report, "model-a-2", id).ready()) << metric_name(id);
  }
  EXPECT_TRUE(readiness(report, "model-a-3", MetricId::kDepthAccuracy).ready());
  for (const auto& m : report.models) {
    if (m.model_id == "model-a") {
      EXPECT_TRUE(m.metrics.at(MetricId::kJepaSimilarity).ready());
    }
  }
}

TEST(Bundle, FlowWithTFramesIsShapeError) {
  ScratchDir dir;
  testing::write_synthetic_bundle(dir.path());
  const auto path = dir / "videos/model-b-0/flow_fwd.wabt";
  write_tensor(TensorRecord({9, 24, 32, 2}, std::vector<float>(9 * 24 * 32 * 2, 0.0f)), path);
  EXPECT_THROW(load_bundle(dir.path()), ShapeError);
}

TEST(Bundle, WrongDtypeIsShapeError) {
  ScratchDir dir;
  testing::write_synthetic_bundle(dir.path());
  write_tensor(TensorRecord({9, 24, 32, 3}, std::vector<float>(9 * 24 * 32 * 3, 0.0f)),
               dir / "videos/model-b-0/frames.wabt");
  EXPECT_THROW(load_bundle(dir.path()), ShapeError);
}

TEST(Bundle, DetectionFrameCountIsShapeError) {
  ScratchDir dir;
  testing::write_synthetic_bundle(dir.path());
  testing::write_file(dir / "videos/model-a-0/detections.json", "[[]]");
  EXPECT_THROW(load_bundle(dir.path()), ShapeError);
}

TEST(Bundle, JudgeAvailability) {
  ScratchDir dir;
  testing::SyntheticOptions o;
  o.verdicts = false;
  testing::write_synthetic_bundle(dir.path(), o);
  const auto b = load_bundle(dir.path());
  EXPECT_TRUE(readiness(validate_bundle(b, JudgeAvailability::kVerdictOrFrames), "model-a-0",
                        MetricId::kPerspectivity).ready());
  EXPECT_EQ(readiness(validate_bundle(b, JudgeAvailability::kVerdictOnly), "model-a-0",
                      MetricId::kPerspectivity).describe(),
            "missing: judge");
  EXPECT_FALSE(readiness(validate_bundle(b, JudgeAvailability::kNone), "model-a-0",
                         MetricId::kPerspectivity).ready());
}

TEST(Bundle, MissingFileIsNotFatal) {
  ScratchDir dir;
  testing::write_synthetic_bundle(dir.path());
  fs::remove(dir / "videos/model-a-4/scene_track.wabt");
  const auto b = load_bundle(dir.path());
  const auto report = validate_bundle(b);
  EXPECT_EQ(readiness(report, "model-a-4", MetricId::kBackgroundConsistency).describe(),
            "missing: scene_track");
  EXPECT_THROW(b.load_track(*b.find("model-a-4"), ArtifactKind::kSceneTrack), ArtifactMissingError);
}

TEST(Bundle, ActionGroupReadiness) {
  ScratchDir dir;
  testing::SyntheticOptions o;
  o.omit = {ArtifactKind::kSceneTrack};
  testing::write_synthetic_bundle(dir.path(), o);
  const auto report = validate_bundle(load_bundle(dir.path()));
  for (const auto& m : report.models) {
    EXPECT_FALSE(m.metrics.at(MetricId::kActionFollowing).ready());
    EXPECT_TRUE(m.metrics.at(MetricId::kJepaSimilarity).ready());
  }
}

TEST(Bundle, RootErrors) {
  ScratchDir dir;
  EXPECT_THROW(load_bundle(dir / "absent"), IoError);
  EXPECT_THROW(load_bundle(dir.path()), IoError);
  testing::write_file(dir / "index.json", "{\"videos\": 3}");
  EXPECT_THROW(load_bundle(dir.path()), FormatError);
}

TEST(Manifest, RoundTripAndInvariants) {
  VideoManifest m;
  m.video_id = "v";
  m.model_id = "m";
  m.task_id = "t";
  m.instruction = "i";
  m.frame_count = 10;
  m.height = 16;
  m.width = 20;
  m.artifacts[ArtifactKind::kFrames] = "frames.wabt";
  m.artifacts[ArtifactKind::kDepth] = "d/depth.wabt";
  m.gt_ref = "g";
  const auto back = VideoManifest::from_json(m.to_json(), "/x");
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_EQ(back.resolve(ArtifactKind::kDepth), fs::path("/x/d/depth.wabt"));

  auto j = m.to_json();
  j["frames"]["T"] = 1;
  EXPECT_THROW(VideoManifest::from_json(j, "/x"), ValidationError);
  j = m.to_json();
  j["frames"]["W"] = 8;
  EXPECT_THROW(VideoManifest::from_json(j, "/x"), ValidationError);
  j = m.to_json();
  j["role"] = "ground_truth";
  EXPECT_THROW(VideoManifest::from_json(j, "/x"), ValidationError);
  j = m.to_json();
  j.erase("video_id");
  EXPECT_THROW(VideoManifest::from_json(j, "/x"), ValidationError);
  j = m.to_json();
  j["role"] = "other";
  EXPECT_THROW(VideoManifest::from_json(j, "/x"), ValidationError);
}

TEST(Detections, ParseAndSerialise) {
  const auto j = nlohmann::json::parse(R"([[{"box":[0,0,2,4],"conf":0.5}],[]])");
  const auto track = parse_detections(j);
  ASSERT_EQ(track.size(), 2u);
  EXPECT_EQ(track[0][0].center(), (Point2{1, 2}));
  EXPECT_TRUE(track[1].empty());
  EXPECT_EQ(parse_detections(detections_to_json(track)).at(0).at(0).conf, 0.5);
  EXPECT_THROW(parse_detections(nlohmann::json::parse(R"([[{"box":[0,0,2],"conf":0.5}]])")),
               FormatError);
  EXPECT_THROW(parse_detections(nlohmann::json::object()), FormatError);
}

TEST(Artifacts, KeysRoundTrip) {
  for (auto k : kAllArtifacts) EXPECT_EQ(parse_artifact_key(artifact_key(k)), k);
  EXPECT_FALSE(parse_artifact_key("video").has_value());
}

}  // namespace
}  // namespace ewm
