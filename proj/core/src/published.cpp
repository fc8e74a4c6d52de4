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
#include "ewm/published.hpp"

#include <string>

namespace ewm::published {
namespace {

// clang-format off
constexpr std::array<ModelRow, 14> kRows = {{
    {"GigaWorld-0",
     {0.5041, 0.3991, 0.4413, 0.6709, 0.3118, 0.7811, 0.7303, 0.8563,
      0.1756, 0.5368, 0.1552, 0.6316, 0.7596, 0.6156, 0.8591, 0.1134}},
    {"Genie Envisioner",
     {0.2305, 0.3289, 0.3340, 0.6930, 0.0855, 0.6966, 0.7760, 0.9024,
      0.2006, 0.2052, 0.0679, 0.8663, 0.5284, 0.2028, 0.8544, 0.0109}},
    {"TesserAct",
     {0.3322, 0.4590, 0.4579, 0.5150, 0.2447, 0.7579, 0.8250, 0.9238,
      0.2491, 0.5800, 0.1396, 0.7159, 0.7920, 0.6152, 0.8783, 0.0311}},
    {"RoboMaster",
     {0.3487, 0.3842, 0.2966, 0.6124, 0.1484, 0.6940, 0.8295, 0.9123,
      0.3356, 0.5364, 0.1158, 0.8335, 0.7588, 0.5772, 0.8761, 0.0352}},
    {"Vidar",
     {0.4145, 0.4068, 0.5608, 0.2767, 0.1426, 0.7973, 0.7629, 0.8300,
      0.2350, 0.5348, 0.1928, 0.7872, 0.7592, 0.5912, 0.8826, 0.0819}},
    {"Cosmos-Predict 2.5 (text)",
     {0.6668, 0.4501, 0.3126, 0.5911, 0.4302, 0.7882, 0.7488, 0.8511,
      0.1383, 0.3872, 0.0816, 0.7051, 0.7964, 0.2664, 0.7733, 0.1418}},
    {"Cosmos-Predict 2.5 (action)",
     {0.4489, 0.3576, 0.9296, 0.3994, 0.0573, 0.7100, 0.8197, 0.8894,
      0.3528, 0.5500, 0.2945, 0.8862, 0.7644, 0.5840, 0.8879, 0.0133}},
    {"WoW",
     {0.4587, 0.3868, 0.7440, 0.4608, 0.2706, 0.7692, 0.8161, 0.9025,
      0.2170, 0.5564, 0.2058, 0.7283, 0.7672, 0.5692, 0.8842, 0.0434}},
    {"CtrlWorld",
     {0.3522, 0.3893, 0.9185, 0.4257, 0.3449, 0.7377, 0.8411, 0.9057,
      0.1729, 0.6212, 0.4766, 0.9300, 0.7960, 0.7272, 0.8912, 0.0210}},
    {"Wan 2.2",
     {0.3884, 0.3963, 0.7575, 0.4349, 0.1269, 0.7019, 0.8388, 0.9042,
      0.4776, 0.5184, 0.1627, 0.7768, 0.7660, 0.5376, 0.8877, 0.0512}},
    {"CogvideoX",
     {0.3582, 0.3777, 0.9384, 0.3166, 0.2189, 0.7391, 0.8083, 0.8773,
      0.3580, 0.5940, 0.3526, 0.9097, 0.7828, 0.7268, 0.8977, 0.0076}},
    {"IRASim",
     {0.3489, 0.3623, 0.9330, 0.4139, 0.2083, 0.7052, 0.8312, 0.9068,
      0.3522, 0.5656, 0.3639, 0.9312, 0.7788, 0.6604, 0.8849, 0.0526}},
    {"Veo 3.1",
     {0.6605, 0.4632, 0.5694, 0.5450, 0.1396, 0.6989, 0.7878, 0.8710,
      0.3247, 0.7872, 0.1231, 0.7421, 0.8276, 0.9328, 0.8607, 0.0852}},
    {"Wan 2.6",
     {0.6824, 0.4433, 0.7229, 0.7421, 0.4532, 0.8539, 0.7517, 0.8687,
      0.1904, 0.7280, 0.1182, 0.7144, 0.8032, 0.8536, 0.8728, 0.0992}},}};
// clang-format on

struct Counts {
  std::string_view model_id;
  long task1;
  long task2;
};

constexpr std::array<Counts, 8> kDataEngine = {{
    {"pi0.5 zero-shot", 2, 5},
    {"pi0.5 real data", 77, 66},
    {"Genie Envisioner", 7, 21},
    {"TesserAct", 1, 35},
    {"RoboMaster", 7, 68},
    {"Vidar", 13, 53},
    {"WoW", 45, 71},
    {"Wan 2.2", 15, 41},
}};

constexpr std::array<Counts, 7> kActionPlanner = {{
    {"pi0.5", 77, 66},
    {"Genie Envisioner", 10, 20},
    {"TesserAct", 1, 35},
    {"RoboMaster", 8, 20},
    {"Vidar", 2, 19},
    {"WoW", 20, 21},
    {"Wan 2.2", 12, 20},
}};

TaskResultLedger ledger(std::span<const Counts> counts, TaskRole role) {
  TaskResultLedger out;
  for (const auto& c : counts) {
    out.entries.push_back({std::string(c.model_id), "task1", 100, c.task1, role});
    out.entries.push_back({std::string(c.model_id), "task2", 100, c.task2, role});
  }
  return out;
}

}  // namespace

std::span<const ModelRow> model_rows() { return kRows; }

const ModelRow* find_row(std::string_view model_id) {
  for (const auto& r : kRows) {
    if (r.model_id == model_id) return &r;
  }
  return nullptr;
}

MetricVector to_vector(const ModelRow& row) {
  MetricVector v;
  v.model_id = std::string(row.model_id);
  v.values = row.values;
  v.sample_counts.fill(1);
  return v;
}

std::vector<MetricVector> vectors() {
  std::vector<MetricVector> out;
  for (const auto& r : kRows) out.push_back(to_vector(r));
  return out;
}

TaskResultLedger data_engine_ledger() { return ledger(kDataEngine, TaskRole::kDataEngine); }

TaskResultLedger action_planner_ledger() { return ledger(kActionPlanner, TaskRole::kActionPlanner); }

}  // namespace ewm::published
