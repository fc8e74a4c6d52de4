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
#include "ewm/scoring.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "ewm/error.hpp"

namespace ewm {
namespace {

std::string_view direction_name(Direction d) {
  return d == Direction::kHigherBetter ? "higher_better" : "lower_better";
}

MetricId require_metric(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ValidationError(std::string("\"") + key + "\" must be a metric id string");
  }
  const auto name = j.at(key).get<std::string>();
  const auto id = parse_metric_id(name);
  if (!id) throw ValidationError("unknown metric id \"" + name + "\"");
  return *id;
}

double require_number(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ValidationError(where + ": \"" + key + "\" must be a number");
  }
  return j.at(key).get<double>();
}

std::string join_missing(const std::vector<MetricId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? ", " : "") + std::string(metric_name(ids[i]));
  return out;
}

}  // namespace

const NormalizationBounds* BoundsSet::find(MetricId id) const {
  for (const auto& b : bounds) {
    if (b.metric == id) return &b;
  }
  return nullptr;
}

void BoundsSet::validate() const {
  if (version.empty()) throw ValidationError("bounds: version must be non-empty");
  std::set<MetricId> seen;
  for (const auto& b : bounds) {
    const auto name = std::string(metric_name(b.metric));
    if (metric_scale(b.metric) != Scale::kRaw) {
      throw ValidationError("bounds: " + name + " is already on the unit interval");
    }
    if (!seen.insert(b.metric).second) throw ValidationError("bounds: duplicate entry for " + name);
    if (!(b.max > b.min)) throw ValidationError("bounds: " + name + " needs max > min");
    const auto expected = b.metric == MetricId::kDepthAccuracy ? Direction::kLowerBetter
                                                                : Direction::kHigherBetter;
    if (b.direction != expected) {
      throw ValidationError("bounds: " + name + " must be " + std::string(direction_name(expected)));
    }
  }
  for (auto id : kAllMetrics) {
    if (metric_scale(id) == Scale::kRaw && seen.count(id) == 0) {
      throw ValidationError("bounds: no entry for " + std::string(metric_name(id)));
    }
  }
}

BoundsSet BoundsSet::defaults() {
  return {std::string(kDefaultBoundsVersion),
          {
              {MetricId::kPhotometricConsistency, 6.7899, 0.1257, Direction::kHigherBetter},
              {MetricId::kMotionSmoothness, 2.6413, 0.0000, Direction::kHigherBetter},
              {MetricId::kTrajectoryAccuracy, 40.8540, 0.0000, Direction::kHigherBetter},
              {MetricId::kFlowScore, 8.9414, 0.0531, Direction::kHigherBetter},
              {MetricId::kDepthAccuracy, 4.3711, 0.2228, Direction::kLowerBetter},
          }};
}

BoundsSet BoundsSet::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("bounds file must be a JSON array");
  BoundsSet set;
  for (const auto& entry : j) {
    if (!entry.is_object()) throw ValidationError("bounds entries must be objects");
    NormalizationBounds b;
    b.metric = require_metric(entry, "metric_id");
    const auto where = "bounds for " + std::string(metric_name(b.metric));
    b.max = require_number(entry, "max", where);
    b.min = require_number(entry, "min", where);
    const auto dir = entry.value("direction", std::string());
    if (dir == "higher_better") {
      b.direction = Direction::kHigherBetter;
    } else if (dir == "lower_better") {
      b.direction = Direction::kLowerBetter;
    } else {
      throw ValidationError(where + ": direction must be higher_better or lower_better");
    }
    const auto version = entry.value("version", std::string());
    if (set.version.empty()) {
      set.version = version;
    } else if (version != set.version) {
      throw ValidationError("bounds file mixes versions " + set.version + " and " + version);
    }
    set.bounds.push_back(b);
  }
  set.validate();
  return set;
}

BoundsSet BoundsSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bounds file " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

nlohmann::json BoundsSet::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& b : bounds) {
    j.push_back({{"metric_id", metric_name(b.metric)},
                 {"max", b.max},
                 {"min", b.min},
                 {"direction", direction_name(b.direction)},
                 {"version", version}});
  }
  return j;
}

double normalize_metric(double raw, const NormalizationBounds& bounds) {
  const double t = std::clamp((raw - bounds.min) / (bounds.max - bounds.min), 0.0, 1.0);
  return bounds.direction == Direction::kHigherBetter ? t : 1.0 - t;
}

double normalize_value(const RawMetricValue& value, const BoundsSet& bounds) {
  if (value.scale == Scale::kUnitInterval) return value.value;
  const auto* b = bounds.find(value.id);
  if (b == nullptr) {
    throw ValidationError("no normalization bounds for " + std::string(metric_name(value.id)));
  }
  return normalize_metric(value.value, *b);
}

nlohmann::json ConfigSnapshot::to_json() const {
  return {{"gamma", gamma},
          {"alpha_dyn", alpha_dyn},
          {"semantic_weight", semantic_weight},
          {"bounds_version", bounds_version}};
}

ConfigSnapshot ConfigSnapshot::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config snapshot must be an object");
  ConfigSnapshot c;
  c.gamma = require_number(j, "gamma", "config");
  c.alpha_dyn = require_number(j, "alpha_dyn", "config");
  c.semantic_weight = require_number(j, "semantic_weight", "config");
  if (!j.contains("bounds_version") || !j.at("bounds_version").is_string()) {
    throw ValidationError("config: bounds_version must be a string");
  }
  c.bounds_version = j.at("bounds_version").get<std::string>();
  return c;
}

std::vector<MetricId> PartialMetricVector::missing() const {
  std::vector<MetricId> out;
  for (auto id : kAllMetrics) {
    if (!values[metric_index(id)]) out.push_back(id);
  }
  return out;
}

void MetricVector::validate() const {
  for (auto id : kAllMetrics) {
    const double v = values[metric_index(id)];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw RangeError(model_id + ": " + std::string(metric_name(id)) + " = " + std::to_string(v) +
                       " outside [0, 1]");
    }
  }
}

nlohmann::json MetricVector::to_json() const {
  nlohmann::json vals = nlohmann::json::object();
  nlohmann::json counts = nlohmann::json::object();
  for (auto id : kAllMetrics) {
    vals[std::string(metric_name(id))] = values[metric_index(id)];
    counts[std::string(metric_name(id))] = sample_counts[metric_index(id)];
  }
  return {{"model_id", model_id},
          {"values", vals},
          {"sample_counts", counts},
          {"config", config.to_json()},
          {"bounds_version", config.bounds_version},
          {"ewm_score", ewm_score(*this)}};
}

MetricVector MetricVector::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("model_id") || !j.at("model_id").is_string()) {
    throw ValidationError("metric vector needs a string model_id");
  }
  MetricVector v;
  v.model_id = j.at("model_id").get<std::string>();
  if (!j.contains("values") || !j.at("values").is_object()) {
    throw IncompleteVectorError(v.model_id + ": metric vector has no values");
  }
  const auto& vals = j.at("values");
  std::vector<MetricId> gaps;
  for (auto id : kAllMetrics) {
    const auto name = std::string(metric_name(id));
    if (!vals.contains(name) || !vals.at(name).is_number()) {
      gaps.push_back(id);
      continue;
    }
    v.values[metric_index(id)] = vals.at(name).get<double>();
    if (j.contains("sample_counts") && j.at("sample_counts").contains(name)) {
      v.sample_counts[metric_index(id)] = j.at("sample_counts").at(name).get<std::size_t>();
    }
  }
  if (!gaps.empty()) {
    throw IncompleteVectorError(v.model_id + ": missing " + join_missing(gaps));
  }
  if (j.contains("config")) v.config = ConfigSnapshot::from_json(j.at("config"));
  v.validate();
  return v;
}

PartialMetricVector aggregate_metrics(std::string model_id, std::span<const PerVideoRecord> per_video,
                                      std::span<const RawMetricValue> corpus,
                                      const BoundsSet& bounds, const ConfigSnapshot& config) {
  PartialMetricVector out;
  out.model_id = std::move(model_id);
  out.config = config;
  out.config.bounds_version = bounds.version;

  std::array<std::map<std::string, double>, kMetricCount> by_video;
  for (const auto& rec : per_video) {
    if (rec.value.granularity != Granularity::kPerVideo) {
      throw ValidationError(std::string(metric_name(rec.value.id)) + " is not a per-video metric");
    }
    auto& slot = by_video[metric_index(rec.value.id)];
    if (!slot.emplace(rec.video_id, normalize_value(rec.value, bounds)).second) {
      throw ValidationError("duplicate " + std::string(metric_name(rec.value.id)) + " record for " +
                            rec.video_id);
    }
  }
  for (auto id : kAllMetrics) {
    const auto& slot = by_video[metric_index(id)];
    if (slot.empty()) continue;
    double sum = 0.0;
    for (const auto& [video, value] : slot) sum += value;  // video_id order
    out.values[metric_index(id)] = sum / static_cast<double>(slot.size());
    out.sample_counts[metric_index(id)] = slot.size();
  }
  for (const auto& value : corpus) {
    if (value.granularity != Granularity::kPerModelCorpus) {
      throw ValidationError(std::string(metric_name(value.id)) + " is not a corpus metric");
    }
    auto& slot = out.values[metric_index(value.id)];
    if (slot) throw ValidationError("duplicate corpus record for " + std::string(metric_name(value.id)));
    slot = normalize_value(value, bounds);
    out.sample_counts[metric_index(value.id)] = 1;
  }
  return out;
}

MetricVector complete_vector(const PartialMetricVector& partial) {
  const auto gaps = partial.missing();
  if (!gaps.empty()) {
    throw IncompleteVectorError(partial.model_id + ": incomplete metric vector, missing " +
                                join_missing(gaps));
  }
  MetricVector v;
  v.model_id = partial.model_id;
  v.config = partial.config;
  v.sample_counts = partial.sample_counts;
  for (auto id : kAllMetrics) v.values[metric_index(id)] = *partial.values[metric_index(id)];
  v.validate();
  return v;
}

MetricVector assemble_metric_vector(std::string model_id, std::span<const PerVideoRecord> per_video,
                                    std::span<const RawMetricValue> corpus, const BoundsSet& bounds,
                                    const ConfigSnapshot& config) {
  return complete_vector(aggregate_metrics(std::move(model_id), per_video, corpus, bounds, config));
}

double ewm_score(const MetricVector& vector) {
  vector.validate();
  double sum = 0.0;
  for (double v : vector.values) sum += v;
  return 100.0 * sum / static_cast<double>(kMetricCount);
}

void require_uniform_bounds(std::span<const MetricVector> vectors) {
  if (vectors.empty()) return;
  for (const auto& v : vectors) {
    if (v.config.bounds_version != vectors.front().config.bounds_version) {
      throw BoundsMismatchError("metric vectors use different bounds versions (" +
                                vectors.front().config.bounds_version + " vs " +
                                v.config.bounds_version + ")");
    }
  }
}

double normalize_human_score(int likert) {
  if (likert < 1 || likert > 5) {
    throw RangeError("human score " + std::to_string(likert) + " outside 1..5");
  }
  return (likert - 1) / 4.0 * 100.0;
}

double win_rate(std::string_view model, std::span<const PairwiseComparison> comparisons) {
  double credit = 0.0;
  std::size_t appearances = 0;
  for (const auto& c : comparisons) {
    if (c.model_a == c.model_b) throw ValidationError("pairwise comparison of a model with itself");
    const bool is_a = c.model_a == model;
    const bool is_b = c.model_b == model;
    if (!is_a && !is_b) continue;
    ++appearances;
    if (c.winner == Winner::kTie) {
      credit += 0.5;
    } else if ((c.winner == Winner::kA && is_a) || (c.winner == Winner::kB && is_b)) {
      credit += 1.0;
    }
  }
  if (appearances == 0) {
    throw SampleSizeError("win_rate: " + std::string(model) + " appears in no comparison");
  }
  return credit / static_cast<double>(appearances);
}

}  // namespace ewm
