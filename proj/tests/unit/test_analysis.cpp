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

#include <cmath>

#include "ewm/analysis.hpp"
#include "ewm/csv.hpp"
#include "ewm/error.hpp"
#include "ewm/published.hpp"

namespace ewm {
namespace {

MetricVector filled(double v, std::string model) {
  MetricVector out;
  out.model_id = std::move(model);
  out.values.fill(v);
  out.sample_counts.fill(1);
  return out;
}

TaskResult entry(std::string model, std::string task, long n, long k, TaskRole role) {
  return {std::move(model), std::move(task), n, k, role};
}

TEST(Ledger, SuccessRates) {
  EXPECT_DOUBLE_EQ(success_rate(entry("WoW", "task1", 100, 45, TaskRole::kDataEngine)), 0.45);
  EXPECT_DOUBLE_EQ(success_rate(entry("p", "task1", 100, 77, TaskRole::kDataEngine)), 0.77);
  EXPECT_DOUBLE_EQ(success_rate(entry("p", "task1", 100, 0, TaskRole::kDataEngine)), 0.0);
  EXPECT_THROW(entry("p", "t", 0, 0, TaskRole::kDataEngine).validate(), SampleSizeError);
  EXPECT_THROW(entry("p", "t", 10, 11, TaskRole::kDataEngine).validate(), RangeError);
  EXPECT_THROW(entry("", "t", 10, 1, TaskRole::kDataEngine).validate(), ValidationError);
}

TEST(Ledger, PublishedCounts) {
  const auto de = published::data_engine_ledger();
  EXPECT_NO_THROW(de.validate());
  bool found = false;
  for (const auto& e : de.entries) {
    EXPECT_EQ(e.trials, 100);
    if (e.model_id == "WoW" && e.task_id == "task1") {
      EXPECT_DOUBLE_EQ(success_rate(e), 0.45);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  const auto rates = de.model_rates(TaskRole::kDataEngine);
  EXPECT_DOUBLE_EQ(rates.at("pi0.5 real data"), (77.0 + 66.0) / 200.0);
  EXPECT_TRUE(de.model_rates(TaskRole::kActionPlanner).empty());
  const auto ap = published::action_planner_ledger();
  EXPECT_EQ(ap.with_role(TaskRole::kActionPlanner).size(), 14u);
}

TEST(Ledger, DuplicateEntry) {
  TaskResultLedger l;
  l.entries = {entry("a", "t", 10, 1, TaskRole::kDataEngine), entry("a", "t", 10, 2, TaskRole::kDataEngine)};
  EXPECT_THROW(l.validate(), ValidationError);
  l.entries[1].role = TaskRole::kActionPlanner;
  EXPECT_NO_THROW(l.validate());
}

TEST(Roles, Names) {
  for (auto r : {TaskRole::kDataEngine, TaskRole::kActionPlanner, TaskRole::kPolicyEvalWm,
                 TaskRole::kPolicyEvalSim}) {
    EXPECT_EQ(parse_task_role(task_role_name(r)), r);
  }
  EXPECT_FALSE(parse_task_role("other"));
}

TEST(Correlate, Examples) {
  const std::map<std::string, double> e = {{"a", 50.0}, {"b", 60.0}, {"c", 55.0}};
  EXPECT_DOUBLE_EQ(correlate_series(e, e).r, 1.0);
  const std::map<std::string, double> x = {{"a", 1}, {"b", 2}, {"c", 3}};
  const std::map<std::string, double> y = {{"a", 1}, {"b", 3}, {"c", 2}};
  const auto c = correlate_series(x, y, "ewm", "human");
  EXPECT_NEAR(c.r, 0.5, 1e-15);
  EXPECT_EQ(c.n, 3u);
  EXPECT_EQ(c.pairs.at(1).label, "b");
  EXPECT_EQ(c.to_json().at("x"), "ewm");
  const std::map<std::string, double> other = {{"d", 1}, {"e", 2}, {"f", 3}};
  EXPECT_THROW(correlate_series(x, other), ValidationError);
}

TaskResultLedger rates_ledger(const std::vector<long>& percent, TaskRole role) {
  TaskResultLedger l;
  for (std::size_t i = 0; i < percent.size(); ++i) {
    l.entries.push_back(entry("p" + std::to_string(i), "task1", 100, percent[i], role));
  }
  return l;
}

TEST(PolicyEvaluator, Examples) {
  const auto sim = rates_ledger({10, 30, 50}, TaskRole::kPolicyEvalSim);
  const auto same = policy_evaluator_correlation(rates_ledger({10, 30, 50}, TaskRole::kPolicyEvalWm), sim);
  EXPECT_NEAR(same.correlation.r, 1.0, 1e-12);
  EXPECT_NEAR(same.mean_gap, 0.0, 1e-15);
  const auto shifted =
      policy_evaluator_correlation(rates_ledger({20, 40, 60}, TaskRole::kPolicyEvalWm), sim);
  EXPECT_NEAR(shifted.correlation.r, 1.0, 1e-12);
  EXPECT_NEAR(shifted.mean_gap, 0.10, 1e-12);
  ASSERT_TRUE(shifted.correlation.mean_gap.has_value());
  EXPECT_NEAR(*shifted.correlation.mean_gap, 0.10, 1e-12);
  EXPECT_THROW(
      policy_evaluator_correlation(rates_ledger({50, 50, 50}, TaskRole::kPolicyEvalWm), sim),
      DegenerateInputError);
}

TEST(Human, Aggregate) {
  const std::vector<HumanRating> r = {{"v1", "m", HumanDimension::kOverallQuality, 5},
                                      {"v2", "m", HumanDimension::kOverallQuality, 3},
                                      {"v1", "m", HumanDimension::kPhysicalAdherence, 1},
                                      {"v1", "n", HumanDimension::kInstructionFollowing, 4}};
  const auto agg = aggregate_human(r);
  ASSERT_EQ(agg.size(), 2u);
  const auto& m = agg.at("m");
  EXPECT_DOUBLE_EQ(*m.dims[0], 75.0);
  EXPECT_FALSE(m.dims[1].has_value());
  EXPECT_DOUBLE_EQ(*m.dims[2], 0.0);
  EXPECT_DOUBLE_EQ(*m.overall(), 37.5);
  EXPECT_DOUBLE_EQ(*agg.at("n").overall(), 75.0);
  const auto back = HumanScores::from_json(m.to_json());
  EXPECT_EQ(back.dims, m.dims);
  for (auto d : kAllHumanDimensions) EXPECT_EQ(parse_human_dimension(human_dimension_name(d)), d);
}

std::vector<LeaderboardEntry> published_entries() {
  std::vector<LeaderboardEntry> out;
  for (const auto& v : published::vectors()) out.push_back(LeaderboardEntry::from_vector(v));
  return out;
}

TEST(Leaderboard, SortContract) {
  auto top = filled(0.0, "Wan 2.6");
  top.values = published::find_row("Wan 2.6")->values;
  auto low = filled(0.4, "low");
  const std::vector<LeaderboardEntry> e = {LeaderboardEntry::from_vector(low),
                                           LeaderboardEntry::from_vector(top)};
  EXPECT_NEAR(e[0].ewm_score, 40.0, 1e-12);
  const auto ranked = rank_entries(e);
  EXPECT_EQ(ranked.front().model_id, "Wan 2.6");
  const auto md = emit_leaderboard(e, LeaderboardFormat::kMarkdown);
  EXPECT_LT(md.find("| Wan 2.6 |"), md.find("| low |"));
  EXPECT_NE(md.find("| 61.86 |"), std::string::npos);
  EXPECT_NE(md.find("| 40.00 |"), std::string::npos);
}

TEST(Leaderboard, TieBreakByModelId) {
  const std::vector<LeaderboardEntry> e = {LeaderboardEntry::from_vector(filled(0.5, "b")),
                                           LeaderboardEntry::from_vector(filled(0.5, "a"))};
  const auto r = rank_entries(e);
  EXPECT_EQ(r[0].model_id, "a");
}

TEST(Leaderboard, SingleEntry) {
  const std::vector<LeaderboardEntry> e = {LeaderboardEntry::from_vector(filled(1.0, "only"))};
  const auto md = emit_leaderboard(e, LeaderboardFormat::kMarkdown);
  std::size_t rows = 0;
  for (std::size_t p = md.find("\n| "); p != std::string::npos; p = md.find("\n| ", p + 1)) ++rows;
  EXPECT_EQ(rows, 2u);  // header and one data row
  EXPECT_NE(md.find("| 1 | only |"), std::string::npos);
  const auto csv = parse_csv(emit_leaderboard(e, LeaderboardFormat::kCsv));
  EXPECT_EQ(csv.size(), 2u);
}

TEST(Leaderboard, MixedBoundsRejected) {
  auto a = filled(0.5, "a");
  auto b = filled(0.5, "b");
  b.config.bounds_version = "v2";
  const std::vector<LeaderboardEntry> e = {LeaderboardEntry::from_vector(a),
                                           LeaderboardEntry::from_vector(b)};
  EXPECT_THROW(emit_leaderboard(e, LeaderboardFormat::kJson), BoundsMismatchError);
  EXPECT_THROW(emit_leaderboard({}, LeaderboardFormat::kJson), SampleSizeError);
}

TEST(Leaderboard, PublishedRowsRankAndFormatsAgree) {
  auto entries = published_entries();
  ASSERT_EQ(entries.size(), 14u);
  entries[0].win_rate = 0.25;
  entries[1].task_success["data_engine"] = 0.14;
  entries[2].human.dims[0] = 62.5;
  const auto ranked = rank_entries(entries);
  EXPECT_EQ(ranked.front().model_id, "Wan 2.6");
  EXPECT_EQ(ranked.back().model_id, "Genie Envisioner");
  for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_GE(ranked[i - 1].ewm_score, ranked[i].ewm_score);

  const auto doc = nlohmann::json::parse(emit_leaderboard(entries, LeaderboardFormat::kJson));
  const auto rows = parse_csv(emit_leaderboard(entries, LeaderboardFormat::kCsv));
  const auto& header = rows.at(0);
  ASSERT_EQ(rows.size(), 15u);
  ASSERT_EQ(doc.at("entries").size(), 14u);
  EXPECT_EQ(doc.at("bounds_version"), kDefaultBoundsVersion);
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  for (std::size_t i = 0; i < 14; ++i) {
    const auto& j = doc.at("entries").at(i);
    const auto& row = rows.at(i + 1);
    EXPECT_EQ(row.at(col("model_id")), j.at("model_id").get<std::string>());
    for (auto id : kAllMetrics) {
      const auto name = std::string(metric_name(id));
      EXPECT_EQ(std::stod(row.at(col(name))), j.at("metrics").at(name).get<double>());
    }
    EXPECT_EQ(std::stod(row.at(col("ewm_score"))), j.at("ewm_score").get<double>());
    const auto& w = row.at(col("win_rate"));
    if (j.at("win_rate").is_null()) {
      EXPECT_TRUE(w.empty());
    } else {
      EXPECT_EQ(std::stod(w), j.at("win_rate").get<double>());
    }
    const auto& s = row.at(col("success_data_engine"));
    if (j.at("task_success").contains("data_engine")) {
      EXPECT_EQ(std::stod(s), j.at("task_success").at("data_engine").get<double>());
    } else {
      EXPECT_TRUE(s.empty());
    }
    const auto& h = row.at(col("human_overall_quality"));
    if (j.at("human").at("overall_quality").is_null()) {
      EXPECT_TRUE(h.empty());
    } else {
      EXPECT_EQ(std::stod(h), j.at("human").at("overall_quality").get<double>());
    }
  }
}

TEST(Radar, Axes) {
  const auto ones = emit_radar(LeaderboardEntry::from_vector(filled(1.0, "m")));
  for (double a : ones.axes) EXPECT_EQ(a, 1.0);
  auto v = filled(1.0, "m");
  v[MetricId::kInteractionQuality] = 0.2;
  v[MetricId::kTrajectoryAccuracy] = 0.4;
  const auto r = emit_radar(LeaderboardEntry::from_vector(v));
  EXPECT_NEAR(r[RadarAxis::kPhysics], 0.3, 1e-15);
  EXPECT_EQ(r[RadarAxis::kVisual], 1.0);
  EXPECT_EQ(r.to_json().at("axes").size(), 6u);
  std::size_t members = 0;
  for (std::size_t a = 0; a < kRadarAxisCount; ++a) {
    members += radar_axis_members(static_cast<RadarAxis>(a)).size();
  }
  EXPECT_EQ(members, 16u);
  auto bad = LeaderboardEntry::from_vector(filled(1.0, "m"));
  bad.vector.values[0] = std::nan("");
  EXPECT_THROW(emit_radar(bad), Error);
}

TEST(Report, Contents) {
  const auto entries = published_entries();
  const std::map<std::string, double> a = {{"x", 1}, {"y", 2}, {"z", 4}};
  const std::vector<Correlation> corr = {correlate_series(a, a, "a", "a")};
  const auto j = build_report(entries, corr);
  EXPECT_EQ(j.at("bounds_version"), kDefaultBoundsVersion);
  EXPECT_EQ(j.at("models").size(), 14u);
  EXPECT_EQ(j.at("correlations").size(), 1u);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(61.8625), "61.8625");
  EXPECT_EQ(format_number(1.0), "1");
  const double third = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(third)), third);
}

}  // namespace
}  // namespace ewm
