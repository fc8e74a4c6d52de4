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
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ewm/error.hpp"
#include "ewm/metric_ids.hpp"
#include "ewm/pipeline.hpp"

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

std::string env_or(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embodied world model video evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ewmeval 0.1.0");

  ewm::RunConfig cfg;
  std::string bundle;
  std::string output = cfg.output_dir.string();
  std::vector<std::string> models;
  std::vector<std::string> metric_names;
  std::string judge = "replay";
  std::string pooling = "per_frame";
  std::string bounds;
  std::string vectors;
  std::string human;
  std::string tasks;
  std::string input;
  std::string pairwise;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", output, "Output directory")->capture_default_str();
  };
  auto add_bundle = [&](CLI::App* sub) {
    sub->add_option("-b,--bundle", bundle, "Evaluation bundle root")->required();
    sub->add_option("--models", models, "Model ids to include (comma separated)");
    sub->add_option("--metrics", metric_names, "Metric ids to compute (comma separated)");
    sub->add_option("--judge", judge, "Judge mode")
        ->check(CLI::IsMember({"live", "replay", "skip"}))
        ->capture_default_str();
  };
  auto add_analysis = [&](CLI::App* sub) {
    sub->add_option("--vectors", vectors, "Metric vector directory (default <output>/vectors)");
    sub->add_option("--human", human, "Human score file from import-human");
    sub->add_option("--tasks", tasks, "Task ledger from import-tasks, or a ledger CSV");
  };

  auto* validate = app.add_subcommand("validate", "Check artifact readiness for every metric");
  add_bundle(validate);
  add_common(validate);

  auto* evaluate = app.add_subcommand("evaluate", "Compute per-video metrics and metric vectors");
  add_bundle(evaluate);
  add_common(evaluate);
  evaluate->add_option("--gamma", cfg.gamma, "Dynamic penalty threshold")->capture_default_str();
  evaluate->add_option("--alpha-dyn", cfg.alpha_dyn, "Dynamic degree logistic slope")
      ->capture_default_str();
  evaluate->add_option("--semantic-weight", cfg.semantic_weight, "Semantic alignment weight")
      ->capture_default_str();
  evaluate->add_option("--conf-threshold", cfg.detection_conf_threshold,
                       "Detection confidence threshold")
      ->capture_default_str();
  evaluate->add_option("--pooling", pooling, "Dynamic degree pooling")
      ->check(CLI::IsMember({"per_frame", "whole_video"}))
      ->capture_default_str();
  evaluate->add_option("--bounds", bounds, "Normalization bounds file");
  evaluate->add_option("-j,--parallelism", cfg.parallelism, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--judge-concurrency", cfg.judge_concurrency, "Concurrent live judge requests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--seed", cfg.seed, "Seed recorded with the run")->capture_default_str();

  auto* report = app.add_subcommand("report", "Emit leaderboard, radar and report documents");
  add_analysis(report);
  add_common(report);

  auto* correlate = app.add_subcommand("correlate", "Correlate scores with human and task results");
  add_analysis(correlate);
  add_common(correlate);

  auto* import_human = app.add_subcommand("import-human", "Import human ratings CSV");
  import_human->add_option("-i,--input", input, "Ratings CSV (video_id,model_id,dimension,likert)")
      ->required();
  import_human->add_option("--pairwise", pairwise, "Pairwise CSV (model_a,model_b,video_id,winner)");
  add_common(import_human);

  auto* import_tasks = app.add_subcommand("import-tasks", "Import task result ledger CSV");
  import_tasks->add_option("-i,--input", input, "Ledger CSV (model_id,task_id,trials,successes,role)")
      ->required();
  add_common(import_tasks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ewm::kExitOk : ewm::kExitInputError;
  }

  cfg.bundle_root = bundle;
  cfg.output_dir = output;
  cfg.models = split_list(models);
  for (const auto& name : split_list(metric_names)) {
    const auto id = ewm::parse_metric_id(name);
    if (!id) {
      std::cerr << "ewmeval: unknown metric id \"" << name << "\"\n";
      return ewm::kExitInputError;
    }
    cfg.metrics.insert(*id);
  }
  cfg.judge_mode = *ewm::parse_judge_run_mode(judge);
  cfg.pooling = pooling == "whole_video" ? ewm::DynamicPooling::kWholeVideo
                                         : ewm::DynamicPooling::kPerFrame;
  if (!bounds.empty()) cfg.bounds_path = bounds;
  if (!vectors.empty()) cfg.vectors_dir = vectors;
  if (!human.empty()) cfg.human_path = human;
  if (!tasks.empty()) cfg.tasks_path = tasks;
  if (!input.empty()) cfg.input_path = input;
  if (!pairwise.empty()) cfg.pairwise_path = pairwise;
  cfg.judge_endpoint = env_or("JUDGE_ENDPOINT");
  cfg.judge_model = env_or("JUDGE_MODEL");

  try {
    if (*validate) return ewm::cmd_validate(cfg, std::cerr);
    if (*evaluate) return ewm::cmd_evaluate(cfg, std::cerr);
    if (*report) return ewm::cmd_report(cfg, std::cerr);
    if (*correlate) return ewm::cmd_correlate(cfg, std::cerr);
    if (*import_human) return ewm::cmd_import_human(cfg, std::cerr);
    if (*import_tasks) return ewm::cmd_import_tasks(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "ewmeval: " << e.what() << "\n";
    return ewm::kExitInputError;
  }
  return ewm::kExitInputError;
}
