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
#include "ewm/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <tuple>

#include "ewm/error.hpp"
#include "ewm/digest.hpp"
#include "ewm/kernels.hpp"

namespace ewm {
namespace {

constexpr std::array<std::string_view, 4> kRoleNames = {"data_engine", "action_planner",
                                                        "policy_eval_wm", "policy_eval_sim"};

constexpr std::array<std::string_view, kHumanDimensionCount> kHumanNames = {
    "overall_quality", "instruction_following", "physical_adherence"};

constexpr std::array<std::string_view, kRadarAxisCount> kAxisNames = {
    "visual", "motion", "consistency", "physics", "3d", "controllability"};

constexpr std::array<MetricId, 3> kVisual = {MetricId::kImageQuality, MetricId::kAestheticQuality,
                                             MetricId::kJepaSimilarity};
constexpr std::array<MetricId, 3> kMotion = {MetricId::kDynamicDegree, MetricId::kFlowScore,
                                             MetricId::kMotionSmoothness};
constexpr std::array<MetricId, 3> kConsistency = {MetricId::kSubjectConsistency,
                                                  MetricId::kBackgroundConsistency,
                                                  MetricId::kPhotometricConsistency};
constexpr std::array<MetricId, 2> kPhysics = {MetricId::kInteractionQuality,
                                              MetricId::kTrajectoryAccuracy};
constexpr std::array<MetricId, 2> k3d = {MetricId::kDepthAccuracy, MetricId::kPerspectivity};
constexpr std::array<MetricId, 3> kControl = {MetricId::kInstructionFollowing,
                                              MetricId::kSemanticAlignment,
                                              MetricId::kActionFollowing};

std::string fixed(double value, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::vector<std::string> task_columns(std::span<const LeaderboardEntry> entries) {
  std::set<std::string> roles;
  for (const auto& e : entries) {
    for (const auto& [role, rate] : e.task_success) roles.insert(role);
  }
  return {roles.begin(), roles.end()};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view task_role_name(TaskRole role) { return kRoleNames[static_cast<std::size_t>(role)]; }

std::optional<TaskRole> parse_task_role(std::string_view name) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
    if (kRoleNames[i] == name) return static_cast<TaskRole>(i);
  }
  return std::nullopt;
}

void TaskResult::validate() const {
  if (model_id.empty() || task_id.empty()) {
    throw ValidationError("ledger entry needs model_id and task_id");
  }
  if (trials < 1) throw SampleSizeError(model_id + "/" + task_id + ": trials must be >= 1");
  if (successes < 0 || successes > trials) {
    throw RangeError(model_id + "/" + task_id + ": successes " + std::to_string(successes) +
                     " outside 0.." + std::to_string(trials));
  }
}

void TaskResultLedger::validate() const {
  std::set<std::tuple<std::string, std::string, TaskRole>> keys;
  for (const auto& e : entries) {
    e.validate();
    if (!keys.emplace(e.model_id, e.task_id, e.role).second) {
      throw ValidationError("duplicate ledger entry " + e.model_id + "/" + e.task_id + "/" +
                            std::string(task_role_name(e.role)));
    }
  }
}

std::vector<TaskResult> TaskResultLedger::with_role(TaskRole role) const {
  std::vector<TaskResult> out;
  for (const auto& e : entries) {
    if (e.role == role) out.push_back(e);
  }
  return out;
}

std::map<std::string, double> TaskResultLedger::model_rates(TaskRole role) const {
  std::map<std::string, std::pair<long, long>> totals;
  for (const auto& e : entries) {
    if (e.role != role) continue;
    e.validate();
    auto& [s, t] = totals[e.model_id];
    s += e.successes;
    t += e.trials;
  }
  std::map<std::string, double> out;
  for (const auto& [model, st] : totals) {
    out[model] = static_cast<double>(st.first) / static_cast<double>(st.second);
  }
  return out;
}

double success_rate(const TaskResult& entry) {
  entry.validate();
  return static_cast<double>(entry.successes) / static_cast<double>(entry.trials);
}

nlohmann::json Correlation::to_json() const {
  nlohmann::json p = nlohmann::json::array();
  for (const auto& v : pairs) p.push_back({{"label", v.label}, {"x", v.x}, {"y", v.y}});
  nlohmann::json j = {{"x", x_name}, {"y", y_name}, {"r", r}, {"n", n}, {"pairs", p}};
  if (mean_gap) j["mean_gap"] = *mean_gap;
  return j;
}

Correlation correlate_series(const std::map<std::string, double>& x,
                             const std::map<std::string, double>& y, std::string x_name,
                             std::string y_name) {
  std::vector<std::string> only_x;
  std::vector<std::string> only_y;
  for (const auto& [k, v] : x) {
    if (!y.contains(k)) only_x.push_back(k);
  }
  for (const auto& [k, v] : y) {
    if (!x.contains(k)) only_y.push_back(k);
  }
  if (!only_x.empty() || !only_y.empty()) {
    std::string msg = "correlate " + x_name + " vs " + y_name + ": label sets differ";
    for (const auto& k : only_x) msg += "; only in " + x_name + ": " + k;
    for (const auto& k : only_y) msg += "; only in " + y_name + ": " + k;
    throw ValidationError(msg);
  }
  Correlation c;
  c.x_name = std::move(x_name);
  c.y_name = std::move(y_name);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [k, v] : x) {
    c.pairs.push_back({k, v, y.at(k)});
    xs.push_back(v);
    ys.push_back(y.at(k));
  }
  c.n = xs.size();
  c.r = kernels::pearson(xs, ys);
  return c;
}

PolicyCorrelation policy_evaluator_correlation(const TaskResultLedger& wm, const TaskResultLedger& sim) {
  auto rates = [](const TaskResultLedger& ledger, TaskRole role) {
    std::map<std::string, double> out;
    for (const auto& e : ledger.entries) {
      if (e.role != role) continue;
      const auto key = e.model_id + "/" + e.task_id;
      if (!out.emplace(key, success_rate(e)).second) {
        throw ValidationError("duplicate " + std::string(task_role_name(role)) + " entry " + key);
      }
    }
    return out;
  };
  const auto w = rates(wm, TaskRole::kPolicyEvalWm);
  const auto s = rates(sim, TaskRole::kPolicyEvalSim);
  PolicyCorrelation out;
  out.correlation = correlate_series(w, s, "policy_eval_wm", "policy_eval_sim");
  double gap = 0.0;
  for (const auto& p : out.correlation.pairs) gap += p.x - p.y;
  out.mean_gap = gap / static_cast<double>(out.correlation.n);
  out.correlation.mean_gap = out.mean_gap;
  return out;
}

std::string_view human_dimension_name(HumanDimension d) {
  return kHumanNames[static_cast<std::size_t>(d)];
}

std::optional<HumanDimension> parse_human_dimension(std::string_view name) {
  for (std::size_t i = 0; i < kHumanNames.size(); ++i) {
    if (kHumanNames[i] == name) return static_cast<HumanDimension>(i);
  }
  return std::nullopt;
}

std::optional<double> HumanScores::overall() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& d : dims) {
    if (!d) continue;
    sum += *d;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

nlohmann::json HumanScores::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (auto d : kAllHumanDimensions) {
    j[std::string(human_dimension_name(d))] = opt_json(dims[static_cast<std::size_t>(d)]);
  }
  return j;
}

HumanScores HumanScores::from_json(const nlohmann::json& j) {
  HumanScores h;
  if (!j.is_object()) return h;
  for (auto d : kAllHumanDimensions) {
    const auto name = std::string(human_dimension_name(d));
    if (j.contains(name) && j.at(name).is_number()) {
      const double v = j.at(name).get<double>();
      if (!(v >= 0.0 && v <= 100.0)) throw RangeError("human " + name + " outside [0, 100]");
      h.dims[static_cast<std::size_t>(d)] = v;
    }
  }
  return h;
}

std::map<std::string, HumanScores> aggregate_human(std::span<const HumanRating> ratings) {
  // (model, dim) -> video -> scores
  std::map<std::pair<std::string, std::size_t>, std::map<std::string, std::vector<double>>> grouped;
  for (const auto& r : ratings) {
    grouped[{r.model_id, static_cast<std::size_t>(r.dimension)}][r.video_id].push_back(
        normalize_human_score(r.likert));
  }
  std::map<std::string, HumanScores> out;
  for (const auto& [key, videos] : grouped) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [video, scores] : videos) {
      for (double s : scores) {
        sum += s;
        ++n;
      }
    }
    out[key.first].dims[key.second] = sum / static_cast<double>(n);
  }
  return out;
}

LeaderboardEntry LeaderboardEntry::from_vector(MetricVector v) {
  LeaderboardEntry e;
  e.model_id = v.model_id;
  e.ewm_score = ewm::ewm_score(v);
  e.vector = std::move(v);
  return e;
}

void LeaderboardEntry::validate() const {
  vector.validate();
  if (vector.model_id != model_id) {
    throw ValidationError("leaderboard entry " + model_id + " carries vector for " + vector.model_id);
  }
  if (!(ewm_score >= 0.0 && ewm_score <= 100.0)) {
    throw RangeError(model_id + ": ewm_score outside [0, 100]");
  }
  for (const auto& d : human.dims) {
    if (d && !(*d >= 0.0 && *d <= 100.0)) throw RangeError(model_id + ": human score outside [0, 100]");
  }
  if (win_rate && !(*win_rate >= 0.0 && *win_rate <= 1.0)) {
    throw RangeError(model_id + ": win_rate outside [0, 1]");
  }
}

nlohmann::json LeaderboardEntry::to_json() const {
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& [role, rate] : task_success) tasks[role] = rate;
  return {{"model_id", model_id},
          {"metrics", vector.to_json()["values"]},
          {"sample_counts", vector.to_json()["sample_counts"]},
          {"config", vector.config.to_json()},
          {"ewm_score", ewm_score},
          {"human", human.to_json()},
          {"win_rate", opt_json(win_rate)},
          {"task_success", tasks}};
}

std::optional<LeaderboardFormat> parse_leaderboard_format(std::string_view name) {
  if (name == "markdown" || name == "md") return LeaderboardFormat::kMarkdown;
  if (name == "csv") return LeaderboardFormat::kCsv;
  if (name == "json") return LeaderboardFormat::kJson;
  return std::nullopt;
}

std::vector<LeaderboardEntry> rank_entries(std::span<const LeaderboardEntry> entries) {
  std::vector<LeaderboardEntry> out(entries.begin(), entries.end());
  std::sort(out.begin(), out.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.ewm_score != b.ewm_score) return a.ewm_score > b.ewm_score;
    return a.model_id < b.model_id;
  });
  return out;
}

std::string emit_leaderboard(std::span<const LeaderboardEntry> entries, LeaderboardFormat format) {
  if (entries.empty()) throw SampleSizeError("leaderboard needs at least one entry");
  std::vector<MetricVector> vectors;
  for (const auto& e : entries) {
    e.validate();
    vectors.push_back(e.vector);
  }
  require_uniform_bounds(vectors);
  const auto ranked = rank_entries(entries);
  const auto tasks = task_columns(ranked);

  if (format == LeaderboardFormat::kJson) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : ranked) rows.push_back(e.to_json());
    nlohmann::json doc = {{"bounds_version", vectors.front().config.bounds_version},
                          {"entries", rows}};
    return doc.dump(2) + "\n";
  }

  std::vector<std::string> header = {"model_id"};
  for (auto id : kAllMetrics) header.emplace_back(metric_name(id));
  header.emplace_back("ewm_score");
  for (auto d : kAllHumanDimensions) header.push_back("human_" + std::string(human_dimension_name(d)));
  header.emplace_back("win_rate");
  for (const auto& t : tasks) header.push_back("success_" + t);

  std::ostringstream out;
  if (format == LeaderboardFormat::kCsv) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& e : ranked) {
      out << csv_field(e.model_id);
      for (double v : e.vector.values) out << "," << format_number(v);
      out << "," << format_number(e.ewm_score);
      for (const auto& d : e.human.dims) out << "," << opt_number(d);
      out << "," << opt_number(e.win_rate);
      for (const auto& t : tasks) {
        const auto it = e.task_success.find(t);
        out << "," << (it == e.task_success.end() ? "" : format_number(it->second));
      }
      out << "\n";
    }
    return out.str();
  }

  out << "bounds: " << vectors.front().config.bounds_version << "\n\n";
  out << "| rank";
  for (const auto& h : header) out << " | " << h;
  out << " |\n|---:";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i == 0 ? "|:---" : "|---:");
  out << "|\n";
  std::size_t rank = 0;
  for (const auto& e : ranked) {
    out << "| " << ++rank << " | " << md_field(e.model_id);
    for (double v : e.vector.values) out << " | " << fixed(v, 4);
    out << " | " << fixed(e.ewm_score, 2);
    for (const auto& d : e.human.dims) out << " | " << (d ? fixed(*d, 2) : "-");
    out << " | " << (e.win_rate ? fixed(*e.win_rate, 4) : "-");
    for (const auto& t : tasks) {
      const auto it = e.task_success.find(t);
      out << " | " << (it == e.task_success.end() ? "-" : fixed(it->second, 4));
    }
    out << " |\n";
  }
  return out.str();
}

std::string_view radar_axis_name(RadarAxis axis) { return kAxisNames[static_cast<std::size_t>(axis)]; }

std::span<const MetricId> radar_axis_members(RadarAxis axis) {
  switch (axis) {
    case RadarAxis::kVisual: return kVisual;
    case RadarAxis::kMotion: return kMotion;
    case RadarAxis::kConsistency: return kConsistency;
    case RadarAxis::kPhysics: return kPhysics;
    case RadarAxis::k3d: return k3d;
    case RadarAxis::kControllability: return kControl;
  }
  throw ValidationError("unknown radar axis");
}

nlohmann::json RadarRecord::to_json() const {
  nlohmann::json a = nlohmann::json::object();
  for (std::size_t i = 0; i < kRadarAxisCount; ++i) a[std::string(kAxisNames[i])] = axes[i];
  return {{"model_id", model_id}, {"axes", a}};
}

RadarRecord emit_radar(const LeaderboardEntry& entry) {
  entry.vector.validate();
  RadarRecord r;
  r.model_id = entry.model_id;
  for (std::size_t i = 0; i < kRadarAxisCount; ++i) {
    const auto members = radar_axis_members(static_cast<RadarAxis>(i));
    double sum = 0.0;
    for (auto id : members) sum += entry.vector[id];
    r.axes[i] = sum / static_cast<double>(members.size());
  }
  return r;
}

nlohmann::json build_report(std::span<const LeaderboardEntry> entries,
                            std::span<const Correlation> correlations) {
  if (entries.empty()) throw SampleSizeError("report needs at least one entry");
  std::vector<MetricVector> vectors;
  for (const auto& e : entries) vectors.push_back(e.vector);
  require_uniform_bounds(vectors);
  nlohmann::json models = nlohmann::json::array();
  for (const auto& e : rank_entries(entries)) {
    auto j = e.to_json();
    j["config_digest"] = sha256_hex(e.vector.config.to_json().dump());
    models.push_back(std::move(j));
  }
  nlohmann::json corr = nlohmann::json::array();
  for (const auto& c : correlations) corr.push_back(c.to_json());
  return {{"bounds_version", vectors.front().config.bounds_version},
          {"models", models},
          {"correlations", corr}};
}

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace ewm
