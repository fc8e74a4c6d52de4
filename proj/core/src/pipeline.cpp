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
#include "ewm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <semaphore>
#include <ostream>
#include <sstream>
#include <thread>

#include "ewm/analysis.hpp"
#include "ewm/bundle.hpp"
#include "ewm/csv.hpp"
#include "ewm/digest.hpp"
#include "ewm/error.hpp"
#include "ewm/judge.hpp"

namespace ewm {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

class Log {
 public:
  explicit Log(std::ostream& os) : os_(os) {}
  void line(const std::string& text) {
    std::lock_guard lock(mu_);
    os_ << text << "\n";
  }

 private:
  std::ostream& os_;
  std::mutex mu_;
};

JudgeAvailability judge_availability(JudgeRunMode mode) {
  switch (mode) {
    case JudgeRunMode::kLive: return JudgeAvailability::kVerdictOrFrames;
    case JudgeRunMode::kReplay: return JudgeAvailability::kVerdictOnly;
    case JudgeRunMode::kSkip: return JudgeAvailability::kNone;
  }
  return JudgeAvailability::kNone;
}

json metric_params(const RunConfig& c, const BoundsSet& bounds) {
  return {{"snapshot", c.snapshot(bounds).to_json()},
          {"pooling", c.pooling == DynamicPooling::kPerFrame ? "per_frame" : "whole_video"},
          {"detection_conf_threshold", c.detection_conf_threshold},
          {"bounds", bounds.to_json()}};
}

std::vector<MetricId> requested(const RunConfig& c) {
  std::vector<MetricId> out;
  for (auto id : kAllMetrics) {
    if (c.wants(id)) out.push_back(id);
  }
  return out;
}

std::vector<std::string> selected_models(const RunConfig& c, const EvaluationBundle& bundle) {
  const auto all = bundle.models();
  if (c.models.empty()) return all;
  std::vector<std::string> out;
  for (const auto& m : c.models) {
    if (std::find(all.begin(), all.end(), m) == all.end()) {
      throw ValidationError("model \"" + m + "\" has no generated videos in the bundle");
    }
    out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

json verdict_json(const JudgeVerdict& v) {
  auto dim = [](const DimensionVerdict& d) { return json{{"score", d.score}, {"reason", d.reason}}; };
  return {{"interaction_quality", dim(v.interaction_quality)},
          {"perspectivity", dim(v.perspectivity)},
          {"instruction_following", dim(v.instruction_following)}};
}

struct VideoResult {
  std::string video_id;
  std::string model_id;
  std::map<MetricId, RawMetricValue> values;
  std::map<MetricId, std::string> gaps;
};

RawMetricValue raw_value(MetricId id, double v) {
  return {id, v, metric_scale(id), metric_granularity(id)};
}

json video_result_json(const VideoResult& r, const std::string& cache_key, const json& params,
                       const BoundsSet& bounds) {
  json metrics = json::object();
  for (const auto& [id, v] : r.values) {
    metrics[std::string(metric_name(id))] = {{"raw", v.value},
                                             {"normalized", normalize_value(v, bounds)},
                                             {"scale", scale_name(v.scale)}};
  }
  json gaps = json::object();
  for (const auto& [id, why] : r.gaps) gaps[std::string(metric_name(id))] = why;
  return {{"video_id", r.video_id}, {"model_id", r.model_id}, {"cache_key", cache_key},
          {"config", params},       {"metrics", metrics},     {"gaps", gaps}};
}

std::optional<VideoResult> load_cached(const fs::path& path, const std::string& cache_key,
                                       const std::vector<MetricId>& wanted) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    const auto j = read_json_file(path);
    if (j.value("cache_key", std::string()) != cache_key) return std::nullopt;
    if (!j.at("gaps").empty()) return std::nullopt;
    VideoResult r;
    r.video_id = j.at("video_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    for (auto id : wanted) {
      if (metric_granularity(id) != Granularity::kPerVideo) continue;
      const auto name = std::string(metric_name(id));
      if (!j.at("metrics").contains(name)) return std::nullopt;
      r.values[id] = raw_value(id, j.at("metrics").at(name).at("raw").get<double>());
    }
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

class VideoEvaluator {
 public:
  VideoEvaluator(const EvaluationBundle& bundle, const RunConfig& config,
                 const std::map<MetricId, MetricReadiness>& readiness, const VideoManifest& video,
                 std::counting_semaphore<>& judge_slots)
      : bundle_(bundle),
        config_(config),
        mcfg_(config.metric_config()),
        readiness_(readiness),
        video_(video),
        gt_(bundle.ground_truth_for(video)),
        judge_slots_(judge_slots) {}

  VideoResult run() {
    VideoResult r{video_.video_id, video_.model_id, {}, {}};
    for (auto id : kAllMetrics) {
      if (!config_.wants(id) || metric_granularity(id) != Granularity::kPerVideo) continue;
      const auto it = readiness_.find(id);
      if (it != readiness_.end() && !it->second.ready()) {
        r.gaps[id] = it->second.describe();
        continue;
      }
      try {
        r.values[id] = compute(id);
      } catch (const Error& e) {
        r.gaps[id] = e.what();
      }
    }
    return r;
  }

 private:
  RawMetricValue compute(MetricId id) {
    switch (id) {
      case MetricId::kImageQuality: return metrics::image_quality(scores().quality);
      case MetricId::kAestheticQuality: return metrics::aesthetic_quality(scores().aesthetic);
      case MetricId::kDynamicDegree: return raw_value(id, s_dyn());
      case MetricId::kFlowScore: return metrics::flow_score(flow_fwd());
      case MetricId::kMotionSmoothness:
        return metrics::motion_smoothness(frames(), bundle_.load_interpolated(video_));
      case MetricId::kSubjectConsistency:
        return metrics::subject_consistency(
            bundle_.load_track(video_, ArtifactKind::kAppearanceTrack), s_dyn(), mcfg_.dynamic);
      case MetricId::kBackgroundConsistency:
        return metrics::background_consistency(
            bundle_.load_track(video_, ArtifactKind::kSceneTrack), s_dyn(), mcfg_.dynamic);
      case MetricId::kPhotometricConsistency:
        return metrics::photometric_consistency(
            frames(), flow_fwd(), bundle_.load_flow(video_, ArtifactKind::kFlowBwd), s_dyn(),
            mcfg_.dynamic);
      case MetricId::kTrajectoryAccuracy:
        return metrics::trajectory_accuracy(bundle_.load_detections(gt()),
                                            bundle_.load_detections(video_),
                                            mcfg_.detection_conf_threshold);
      case MetricId::kDepthAccuracy:
        return metrics::depth_accuracy(bundle_.load_depth(video_), bundle_.load_depth(gt()),
                                       mcfg_.depth);
      case MetricId::kSemanticAlignment:
        return metrics::semantic_alignment(
            bundle_.load_embedding(video_, ArtifactKind::kDescEmbedding),
            bundle_.load_embedding(gt(), ArtifactKind::kDescEmbedding), mcfg_.semantic_weight);
      case MetricId::kInteractionQuality: return metrics::interaction_quality(verdict());
      case MetricId::kPerspectivity: return metrics::perspectivity(verdict());
      case MetricId::kInstructionFollowing: return metrics::instruction_following(verdict());
      default: break;
    }
    throw ValidationError(std::string(metric_name(id)) + " is not a per-video metric");
  }

  const VideoManifest& gt() const {
    if (gt_ == nullptr) throw ArtifactMissingError(video_.video_id + ": no ground truth video");
    return *gt_;
  }

  const FrameScores& scores() {
    if (!scores_) scores_ = bundle_.load_frame_scores(video_);
    return *scores_;
  }

  const std::vector<Image>& frames() {
    if (!frames_) frames_ = bundle_.load_frames(video_);
    return *frames_;
  }

  const std::vector<Image>& flow_fwd() {
    if (!flow_fwd_) flow_fwd_ = bundle_.load_flow(video_, ArtifactKind::kFlowFwd);
    return *flow_fwd_;
  }

  double s_dyn() {
    if (!s_dyn_) {
      s_dyn_ = metrics::dynamic_degree(flow_fwd(), video_.height, video_.width, mcfg_.dynamic,
                                       mcfg_.pooling)
                   .value;
    }
    return *s_dyn_;
  }

  const JudgeVerdict& verdict() {
    if (verdict_error_) throw Error(*verdict_error_);
    if (verdict_) return *verdict_;
    try {
      verdict_ = config_.judge_mode == JudgeRunMode::kLive ? live_verdict() : replay_verdict();
      return *verdict_;
    } catch (const Error& e) {
      verdict_error_ = e.what();
      throw;
    }
  }

  JudgeVerdict replay_verdict() {
    const auto persisted = bundle_.load_verdict(video_);
    if (!persisted) throw ArtifactMissingError(video_.video_id + ": no persisted judge verdict");
    if (persisted->kind != "quality") {
      throw SchemaError(video_.video_id + ": judge.json holds a " + persisted->kind + " verdict");
    }
    auto v = parse_quality_verdict(persisted->raw_response);
    v.provenance = Provenance::kReplay;
    return v;
  }

  JudgeVerdict live_verdict() {
    if (config_.judge_endpoint.empty()) throw TransportError("no judge endpoint configured");
    const auto raw = bundle_.load_frames_raw(video_);
    const auto& bytes = raw.bytes();
    const std::size_t plane = video_.height * video_.width * 3;
    JudgeRequest req;
    req.endpoint = config_.judge_endpoint;
    req.model_name = config_.judge_model;
    req.prompt_kind = JudgeMode::kQuality;
    req.instruction = video_.instruction;
    for (auto idx : sample_judge_frames(video_.frame_count, JudgeMode::kQuality).indices) {
      req.frames.push_back(encode_png_data_uri(bytes.data() + idx * plane, video_.height, video_.width));
    }
    judge_slots_.acquire();
    std::string body;
    try {
      body = invoke_judge(req, transport_options_from_env());
    } catch (...) {
      judge_slots_.release();
      throw;
    }
    judge_slots_.release();
    const auto content = response_content(body);
    auto v = parse_quality_verdict(content);
    PersistedVerdict persisted{"quality", req.digest(), content, verdict_json(v)};
    write_atomic(bundle_.verdict_path(video_), dump(persisted.to_json()));
    return v;
  }

  const EvaluationBundle& bundle_;
  const RunConfig& config_;
  MetricConfig mcfg_;
  const std::map<MetricId, MetricReadiness>& readiness_;
  const VideoManifest& video_;
  const VideoManifest* gt_;
  std::counting_semaphore<>& judge_slots_;

  std::optional<FrameScores> scores_;
  std::optional<std::vector<Image>> frames_;
  std::optional<std::vector<Image>> flow_fwd_;
  std::optional<double> s_dyn_;
  std::optional<JudgeVerdict> verdict_;
  std::optional<std::string> verdict_error_;
};

std::vector<double> temporal_mean(const std::vector<std::vector<double>>& track) {
  if (track.empty()) throw SampleSizeError("empty track");
  std::vector<double> out(track.front().size(), 0.0);
  for (const auto& row : track) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += row[i];
  }
  for (auto& v : out) v /= static_cast<double>(track.size());
  return out;
}

RawMetricValue model_jepa(const EvaluationBundle& bundle, const std::vector<const VideoManifest*>& videos,
                          const MetricConfig& mcfg) {
  std::vector<std::vector<double>> gen;
  std::map<std::string, const VideoManifest*> refs;
  for (const auto* v : videos) {
    if (bundle.available(*v, ArtifactKind::kStEmbedding)) {
      gen.push_back(bundle.load_embedding(*v, ArtifactKind::kStEmbedding));
    }
    const auto* gt = bundle.ground_truth_for(*v);
    if (gt != nullptr && bundle.available(*gt, ArtifactKind::kStEmbedding)) refs[gt->video_id] = gt;
  }
  std::vector<std::vector<double>> ref;
  for (const auto& [id, gt] : refs) ref.push_back(bundle.load_embedding(*gt, ArtifactKind::kStEmbedding));
  return metrics::jepa_similarity(gen, ref, mcfg.jepa_alpha);
}

struct ModelCorpus {
  std::vector<RawMetricValue> values;
  std::map<MetricId, std::string> gaps;
};

RawMetricValue model_action_following(const EvaluationBundle& bundle, const std::string& model,
                                      std::map<MetricId, std::string>& gaps) {
  std::vector<const ActionGroup*> groups;
  for (const auto& g : bundle.action_groups()) {
    if (g.model_id == model) groups.push_back(&g);
  }
  std::sort(groups.begin(), groups.end(),
            [](const ActionGroup* a, const ActionGroup* b) { return a->group_id < b->group_id; });
  double sum = 0.0;
  std::size_t n = 0;
  std::vector<std::string> skipped;
  for (const auto* g : groups) {
    std::vector<std::string> ids = g->video_ids;
    std::sort(ids.begin(), ids.end());
    std::vector<std::vector<double>> variants;
    bool ok = ids.size() >= 2;
    for (const auto& id : ids) {
      const auto* v = bundle.find(id);
      if (v == nullptr || !bundle.available(*v, ArtifactKind::kSceneTrack)) {
        ok = false;
        break;
      }
      variants.push_back(temporal_mean(bundle.load_track(*v, ArtifactKind::kSceneTrack)));
    }
    if (!ok) {
      skipped.push_back(g->group_id);
      continue;
    }
    sum += metrics::action_following(variants).value;
    ++n;
  }
  if (!skipped.empty()) {
    std::string why = "action groups not ready:";
    for (const auto& s : skipped) why += " " + s;
    gaps[MetricId::kActionFollowing] = why;
  }
  if (n == 0) throw ArtifactMissingError("no action group with >=2 scene-tracked videos");
  return raw_value(MetricId::kActionFollowing, sum / static_cast<double>(n));
}

json partial_vector_json(const PartialMetricVector& p, const std::vector<RawMetricValue>& corpus,
                         const BoundsSet& bounds) {
  json j;
  if (p.complete()) {
    j = complete_vector(p).to_json();
  } else {
    json vals = json::object();
    json counts = json::object();
    for (auto id : kAllMetrics) {
      const auto& v = p.values[metric_index(id)];
      if (!v) continue;
      vals[std::string(metric_name(id))] = *v;
      counts[std::string(metric_name(id))] = p.sample_counts[metric_index(id)];
    }
    j = {{"model_id", p.model_id},
         {"values", vals},
         {"sample_counts", counts},
         {"config", p.config.to_json()},
         {"bounds_version", p.config.bounds_version},
         {"ewm_score", nullptr}};
  }
  json missing = json::array();
  for (auto id : p.missing()) missing.push_back(metric_name(id));
  j["missing"] = missing;
  json c = json::object();
  for (const auto& v : corpus) {
    c[std::string(metric_name(v.id))] = {{"raw", v.value}, {"normalized", normalize_value(v, bounds)}};
  }
  j["corpus"] = c;
  return j;
}

fs::path vectors_dir(const RunConfig& c) {
  return c.vectors_dir ? *c.vectors_dir : c.output_dir / kVectorsDir;
}

struct LoadedVectors {
  std::vector<MetricVector> complete;
  std::vector<std::string> incomplete;
};

LoadedVectors load_vectors(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("vector directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no metric vector files in " + dir.string());
  LoadedVectors out;
  for (const auto& f : files) {
    try {
      out.complete.push_back(MetricVector::from_json(read_json_file(f)));
    } catch (const IncompleteVectorError& e) {
      out.incomplete.push_back(e.what());
    }
  }
  return out;
}

struct HumanInput {
  std::map<std::string, HumanScores> scores;
  std::map<std::string, double> win_rates;
};

std::optional<HumanInput> load_human(const RunConfig& c) {
  const auto path = c.human_path ? *c.human_path : c.output_dir / kHumanFile;
  if (!fs::exists(path)) {
    if (c.human_path) throw IoError("human score file not found: " + path.string());
    return std::nullopt;
  }
  const auto j = read_json_file(path);
  if (!j.contains("models") || !j.at("models").is_object()) {
    throw SchemaError(path.string() + ": expected {\"models\": {...}}");
  }
  HumanInput h;
  for (const auto& [model, entry] : j.at("models").items()) {
    h.scores[model] = HumanScores::from_json(entry);
    if (entry.contains("win_rate") && entry.at("win_rate").is_number()) {
      h.win_rates[model] = entry.at("win_rate").get<double>();
    }
  }
  return h;
}

TaskRole require_role(const std::string& s) {
  const auto r = parse_task_role(s);
  if (!r) throw SchemaError("unknown task role \"" + s + "\"");
  return *r;
}

json ledger_json(const TaskResultLedger& ledger) {
  json entries = json::array();
  for (const auto& e : ledger.entries) {
    entries.push_back({{"model_id", e.model_id},
                       {"task_id", e.task_id},
                       {"trials", e.trials},
                       {"successes", e.successes},
                       {"role", task_role_name(e.role)}});
  }
  json rates = json::object();
  for (auto role : {TaskRole::kDataEngine, TaskRole::kActionPlanner, TaskRole::kPolicyEvalWm,
                    TaskRole::kPolicyEvalSim}) {
    const auto r = ledger.model_rates(role);
    if (r.empty()) continue;
    json m = json::object();
    for (const auto& [model, rate] : r) m[model] = rate;
    rates[std::string(task_role_name(role))] = m;
  }
  return {{"entries", entries}, {"rates", rates}};
}

std::optional<TaskResultLedger> load_tasks(const RunConfig& c) {
  const auto path = c.tasks_path ? *c.tasks_path : c.output_dir / kTasksFile;
  if (!fs::exists(path)) {
    if (c.tasks_path) throw IoError("task ledger not found: " + path.string());
    return std::nullopt;
  }
  if (path.extension() == ".csv") return read_ledger_csv(path);
  const auto j = read_json_file(path);
  if (!j.contains("entries") || !j.at("entries").is_array()) {
    throw SchemaError(path.string() + ": expected {\"entries\": [...]}");
  }
  TaskResultLedger ledger;
  for (const auto& e : j.at("entries")) {
    ledger.entries.push_back({e.at("model_id").get<std::string>(), e.at("task_id").get<std::string>(),
                              e.at("trials").get<long>(), e.at("successes").get<long>(),
                              require_role(e.at("role").get<std::string>())});
  }
  ledger.validate();
  return ledger;
}

std::map<std::string, double> restrict(const std::map<std::string, double>& values,
                                       const std::map<std::string, double>& keys) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : values) {
    if (keys.contains(k)) out[k] = v;
  }
  return out;
}

struct CorrelationSet {
  std::vector<Correlation> computed;
  std::vector<std::string> skipped;
};

CorrelationSet compute_correlations(const std::vector<LeaderboardEntry>& entries,
                                    const std::optional<HumanInput>& human,
                                    const std::optional<TaskResultLedger>& tasks) {
  CorrelationSet out;
  std::map<std::string, double> ewm;
  for (const auto& e : entries) ewm[e.model_id] = e.ewm_score;

  auto attempt = [&](const std::string& name, auto&& fn) {
    try {
      out.computed.push_back(fn());
    } catch (const Error& e) {
      out.skipped.push_back(name + ": " + e.what());
    }
  };
  auto against_ewm = [&](const std::map<std::string, double>& other, const std::string& name) {
    attempt("ewm_score vs " + name, [&] {
      const auto y = restrict(other, ewm);
      return correlate_series(restrict(ewm, y), y, "ewm_score", name);
    });
  };

  if (human && !ewm.empty()) {
    std::map<std::string, double> overall;
    for (const auto& [model, s] : human->scores) {
      if (const auto o = s.overall()) overall[model] = *o;
    }
    against_ewm(overall, "human_overall");
  }
  if (tasks) {
    if (!ewm.empty()) {
      for (auto role : {TaskRole::kDataEngine, TaskRole::kActionPlanner}) {
        const auto rates = tasks->model_rates(role);
        if (!rates.empty()) against_ewm(rates, std::string(task_role_name(role)));
      }
    }
    if (!tasks->with_role(TaskRole::kPolicyEvalWm).empty() ||
        !tasks->with_role(TaskRole::kPolicyEvalSim).empty()) {
      attempt("policy_eval_wm vs policy_eval_sim",
              [&] { return policy_evaluator_correlation(*tasks, *tasks).correlation; });
    }
  }
  return out;
}

std::vector<LeaderboardEntry> build_entries(const std::vector<MetricVector>& vectors,
                                            const std::optional<HumanInput>& human,
                                            const std::optional<TaskResultLedger>& tasks) {
  std::vector<LeaderboardEntry> out;
  for (const auto& v : vectors) {
    auto e = LeaderboardEntry::from_vector(v);
    if (human) {
      if (auto it = human->scores.find(e.model_id); it != human->scores.end()) e.human = it->second;
      if (auto it = human->win_rates.find(e.model_id); it != human->win_rates.end()) e.win_rate = it->second;
    }
    if (tasks) {
      for (auto role : {TaskRole::kDataEngine, TaskRole::kActionPlanner}) {
        const auto rates = tasks->model_rates(role);
        if (auto it = rates.find(e.model_id); it != rates.end()) {
          e.task_success[std::string(task_role_name(role))] = it->second;
        }
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

json correlations_json(const CorrelationSet& set) {
  json c = json::array();
  for (const auto& x : set.computed) c.push_back(x.to_json());
  return {{"correlations", c}, {"skipped", set.skipped}};
}

}  // namespace

std::optional<JudgeRunMode> parse_judge_run_mode(std::string_view name) {
  if (name == "live") return JudgeRunMode::kLive;
  if (name == "replay") return JudgeRunMode::kReplay;
  if (name == "skip") return JudgeRunMode::kSkip;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (!(alpha_dyn > 0.0)) throw ValidationError("alpha_dyn must be positive");
  if (!(semantic_weight > 0.0)) throw ValidationError("semantic weight must be positive");
  if (!(detection_conf_threshold >= 0.0 && detection_conf_threshold <= 1.0)) {
    throw ValidationError("detection confidence threshold must lie in [0, 1]");
  }
  if (parallelism < 1) throw ValidationError("parallelism must be >= 1");
  if (judge_concurrency < 1) throw ValidationError("judge concurrency must be >= 1");
  if (judge_mode == JudgeRunMode::kLive && judge_endpoint.empty()) {
    throw ValidationError("live judging needs JUDGE_ENDPOINT");
  }
}

MetricConfig RunConfig::metric_config() const {
  MetricConfig m;
  m.dynamic.gamma = gamma;
  m.dynamic.alpha_dyn = alpha_dyn;
  m.pooling = pooling;
  m.semantic_weight = semantic_weight;
  m.detection_conf_threshold = detection_conf_threshold;
  return m;
}

ConfigSnapshot RunConfig::snapshot(const BoundsSet& bounds) const {
  return {gamma, alpha_dyn, semantic_weight, bounds.version};
}

BoundsSet RunConfig::load_bounds() const {
  return bounds_path ? BoundsSet::load(*bounds_path) : BoundsSet::defaults();
}

std::string file_stem(std::string_view id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '.' || c == '_' || c == '-') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  if (out.empty() || out == "." || out == "..") out = "%" + out;
  return out;
}

int cmd_validate(const RunConfig& config, std::ostream& os) {
  Log log(os);
  ValidationReport report;
  std::vector<std::string> models;
  try {
    config.validate();
    const auto bundle = load_bundle(config.bundle_root);
    models = selected_models(config, bundle);
    report = validate_bundle(bundle, judge_availability(config.judge_mode));
  } catch (const Error& e) {
    log.line(std::string("validate: ") + e.what());
    return kExitInputError;
  }
  std::erase_if(report.videos, [&](const VideoReadiness& v) {
    return std::find(models.begin(), models.end(), v.model_id) == models.end();
  });
  std::erase_if(report.models, [&](const ModelReadiness& m) {
    return std::find(models.begin(), models.end(), m.model_id) == models.end();
  });
  try {
    write_atomic(config.output_dir / kValidationFile, dump(report.to_json()));
  } catch (const std::exception& e) {
    log.line(std::string("validate: ") + e.what());
    return kExitInputError;
  }
  std::size_t gaps = 0;
  auto note = [&](const std::string& owner, MetricId id, const MetricReadiness& r) {
    if (!config.wants(id) || r.ready()) return;
    ++gaps;
    log.line(owner + " " + std::string(metric_name(id)) + ": " + r.describe());
  };
  for (const auto& v : report.videos) {
    for (const auto& [id, r] : v.metrics) note(v.video_id, id, r);
  }
  for (const auto& m : report.models) {
    for (const auto& [id, r] : m.metrics) note("model " + m.model_id, id, r);
  }
  log.line("validate: " + std::to_string(report.videos.size()) + " videos, " +
           std::to_string(gaps) + " gaps");
  return gaps == 0 ? kExitOk : kExitGaps;
}

int cmd_evaluate(const RunConfig& config, std::ostream& os) {
  Log log(os);
  std::optional<EvaluationBundle> bundle;
  BoundsSet bounds;
  std::vector<std::string> models;
  try {
    config.validate();
    bounds = config.load_bounds();
    bundle = load_bundle(config.bundle_root);
    models = selected_models(config, *bundle);
  } catch (const Error& e) {
    log.line(std::string("evaluate: ") + e.what());
    return kExitInputError;
  }

  const auto report = validate_bundle(*bundle, judge_availability(config.judge_mode));
  std::map<std::string, const VideoReadiness*> readiness;
  for (const auto& v : report.videos) readiness[v.video_id] = &v;

  std::vector<const VideoManifest*> work;
  for (const auto& m : models) {
    for (const auto* v : bundle->generated_videos(m)) work.push_back(v);
  }
  std::sort(work.begin(), work.end(),
            [](const VideoManifest* a, const VideoManifest* b) { return a->video_id < b->video_id; });

  const auto wanted = requested(config);
  const auto params = metric_params(config, bounds);
  json wanted_json = json::array();
  for (auto id : wanted) wanted_json.push_back(metric_name(id));
  const auto raw_root = config.output_dir / kRawDir;

  std::counting_semaphore<> judge_slots(static_cast<std::ptrdiff_t>(config.judge_concurrency));
  std::vector<VideoResult> results(work.size());
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        const auto& video = *work[i];
        const auto* gt = bundle->ground_truth_for(video);
        const json key_src = {{"config", params},
                              {"metrics", wanted_json},
                              {"video", video.to_json()},
                              {"gt", gt != nullptr ? gt->to_json() : json(nullptr)}};
        const auto cache_key = sha256_hex(key_src.dump());
        const auto path = raw_root / file_stem(video.model_id) / (file_stem(video.video_id) + ".json");
        if (auto cached = load_cached(path, cache_key, wanted)) {
          results[i] = std::move(*cached);
          log.line("evaluate " + video.video_id + ": cached");
          continue;
        }
        VideoEvaluator eval(*bundle, config, readiness.at(video.video_id)->metrics, video,
                            judge_slots);
        results[i] = eval.run();
        write_atomic(path, dump(video_result_json(results[i], cache_key, params, bounds)));
        log.line("evaluate " + video.video_id + ": " + std::to_string(results[i].values.size()) +
                 " metrics, " + std::to_string(results[i].gaps.size()) + " gaps");
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(config.parallelism, std::max<std::size_t>(work.size(), 1));
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      log.line(std::string("evaluate: ") + e.what());
      return kExitInputError;
    }
  }

  json video_gaps = json::array();
  for (const auto& r : results) {
    for (const auto& [id, why] : r.gaps) {
      video_gaps.push_back(
          {{"video_id", r.video_id}, {"model_id", r.model_id}, {"metric", metric_name(id)}, {"reason", why}});
    }
  }

  json model_gaps = json::array();
  const auto mcfg = config.metric_config();
  std::map<std::string, const ModelReadiness*> model_ready;
  for (const auto& m : report.models) model_ready[m.model_id] = &m;
  try {
    for (const auto& model : models) {
      std::vector<PerVideoRecord> per_video;
      for (const auto& r : results) {
        if (r.model_id != model) continue;
        for (const auto& [id, v] : r.values) per_video.push_back({r.video_id, v});
      }
      ModelCorpus corpus;
      const auto videos = bundle->generated_videos(model);
      for (auto id : {MetricId::kJepaSimilarity, MetricId::kActionFollowing}) {
        if (!config.wants(id)) continue;
        const auto& ready = model_ready.at(model)->metrics.at(id);
        if (!ready.ready()) {
          corpus.gaps[id] = ready.describe();
          continue;
        }
        try {
          corpus.values.push_back(id == MetricId::kJepaSimilarity
                                      ? model_jepa(*bundle, videos, mcfg)
                                      : model_action_following(*bundle, model, corpus.gaps));
        } catch (const Error& e) {
          corpus.gaps[id] = e.what();
        }
      }
      for (const auto& [id, why] : corpus.gaps) {
        model_gaps.push_back({{"model_id", model}, {"metric", metric_name(id)}, {"reason", why}});
      }
      const auto partial =
          aggregate_metrics(model, per_video, corpus.values, bounds, config.snapshot(bounds));
      write_atomic(config.output_dir / kVectorsDir / (file_stem(model) + ".json"),
                   dump(partial_vector_json(partial, corpus.values, bounds)));
      for (auto id : wanted) {
        if (!partial.values[metric_index(id)] && !corpus.gaps.contains(id)) {
          model_gaps.push_back(
              {{"model_id", model}, {"metric", metric_name(id)}, {"reason", "no video produced a value"}});
        }
      }
    }
    write_atomic(config.output_dir / kGapsFile,
                 dump(json{{"videos", video_gaps}, {"models", model_gaps}}));
  } catch (const Error& e) {
    log.line(std::string("evaluate: ") + e.what());
    return kExitInputError;
  }
  const auto total = video_gaps.size() + model_gaps.size();
  log.line("evaluate: " + std::to_string(work.size()) + " videos, " + std::to_string(models.size()) +
           " models, " + std::to_string(total) + " gaps");
  return total == 0 ? kExitOk : kExitGaps;
}

int cmd_report(const RunConfig& config, std::ostream& os) {
  Log log(os);
  LoadedVectors vectors;
  std::optional<HumanInput> human;
  std::optional<TaskResultLedger> tasks;
  try {
    vectors = load_vectors(vectors_dir(config));
    human = load_human(config);
    tasks = load_tasks(config);
  } catch (const Error& e) {
    log.line(std::string("report: ") + e.what());
    return kExitInputError;
  }
  for (const auto& why : vectors.incomplete) log.line("report: skipping " + why);
  if (vectors.complete.empty()) {
    log.line("report: no complete metric vectors");
    return kExitGaps;
  }
  try {
    require_uniform_bounds(vectors.complete);
    const auto entries = build_entries(vectors.complete, human, tasks);
    const auto corr = compute_correlations(entries, human, tasks);
    for (const auto& why : corr.skipped) log.line("report: correlation skipped, " + why);
    const auto& out = config.output_dir;
    write_atomic(out / "leaderboard.md", emit_leaderboard(entries, LeaderboardFormat::kMarkdown));
    write_atomic(out / "leaderboard.csv", emit_leaderboard(entries, LeaderboardFormat::kCsv));
    write_atomic(out / "leaderboard.json", emit_leaderboard(entries, LeaderboardFormat::kJson));
    json radar = json::array();
    for (const auto& e : rank_entries(entries)) radar.push_back(emit_radar(e).to_json());
    write_atomic(out / "radar.json", dump(radar));
    write_atomic(out / "report.json", dump(build_report(entries, corr.computed)));
    log.line("report: " + std::to_string(entries.size()) + " models");
  } catch (const BoundsMismatchError& e) {
    log.line(std::string("report: ") + e.what());
    return kExitGaps;
  } catch (const Error& e) {
    log.line(std::string("report: ") + e.what());
    return kExitInputError;
  }
  return vectors.incomplete.empty() ? kExitOk : kExitGaps;
}

int cmd_correlate(const RunConfig& config, std::ostream& os) {
  Log log(os);
  std::vector<MetricVector> vectors;
  std::optional<HumanInput> human;
  std::optional<TaskResultLedger> tasks;
  try {
    const auto dir = vectors_dir(config);
    if (fs::is_directory(dir)) vectors = load_vectors(dir).complete;
    human = load_human(config);
    tasks = load_tasks(config);
    require_uniform_bounds(vectors);
  } catch (const BoundsMismatchError& e) {
    log.line(std::string("correlate: ") + e.what());
    return kExitGaps;
  } catch (const Error& e) {
    log.line(std::string("correlate: ") + e.what());
    return kExitInputError;
  }
  if (vectors.empty() && !tasks) {
    log.line("correlate: nothing to correlate (no metric vectors or task ledger)");
    return kExitInputError;
  }
  const auto corr = compute_correlations(build_entries(vectors, human, tasks), human, tasks);
  for (const auto& c : corr.computed) {
    log.line("correlate " + c.x_name + " vs " + c.y_name + ": r=" + format_number(c.r) +
             " n=" + std::to_string(c.n));
  }
  for (const auto& why : corr.skipped) log.line("correlate: skipped, " + why);
  try {
    write_atomic(config.output_dir / kCorrelationsFile, dump(correlations_json(corr)));
  } catch (const Error& e) {
    log.line(std::string("correlate: ") + e.what());
    return kExitInputError;
  }
  return corr.skipped.empty() && !corr.computed.empty() ? kExitOk : kExitGaps;
}

int cmd_import_human(const RunConfig& config, std::ostream& os) {
  Log log(os);
  try {
    if (!config.input_path) throw ValidationError("import-human needs a ratings CSV");
    const auto ratings = read_human_csv(*config.input_path);
    const auto scores = aggregate_human(ratings);
    std::vector<PairwiseComparison> pairs;
    if (config.pairwise_path) pairs = read_pairwise_csv(*config.pairwise_path);
    std::set<std::string> models;
    for (const auto& [m, s] : scores) models.insert(m);
    for (const auto& p : pairs) {
      models.insert(p.model_a);
      models.insert(p.model_b);
    }
    json out = json::object();
    for (const auto& m : models) {
      json entry = json::object();
      if (auto it = scores.find(m); it != scores.end()) {
        entry = it->second.to_json();
        entry["overall"] = it->second.overall() ? json(*it->second.overall()) : json(nullptr);
      }
      bool appears = false;
      for (const auto& p : pairs) appears = appears || p.model_a == m || p.model_b == m;
      entry["win_rate"] = appears ? json(win_rate(m, pairs)) : json(nullptr);
      out[m] = entry;
    }
    write_atomic(config.output_dir / kHumanFile, dump(json{{"models", out}}));
    log.line("import-human: " + std::to_string(ratings.size()) + " ratings, " +
             std::to_string(pairs.size()) + " comparisons, " + std::to_string(models.size()) +
             " models");
  } catch (const Error& e) {
    log.line(std::string("import-human: ") + e.what());
    return kExitInputError;
  }
  return kExitOk;
}

int cmd_import_tasks(const RunConfig& config, std::ostream& os) {
  Log log(os);
  try {
    if (!config.input_path) throw ValidationError("import-tasks needs a ledger CSV");
    const auto ledger = read_ledger_csv(*config.input_path);
    write_atomic(config.output_dir / kTasksFile, dump(ledger_json(ledger)));
    log.line("import-tasks: " + std::to_string(ledger.entries.size()) + " entries");
  } catch (const Error& e) {
    log.line(std::string("import-tasks: ") + e.what());
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace ewm
