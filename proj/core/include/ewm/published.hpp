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

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "ewm/analysis.hpp"
#include "ewm/metric_ids.hpp"
#include "ewm/scoring.hpp"

namespace ewm::published {

/// Normalized metric values reported for one evaluated model, canonical order.
struct ModelRow {
  std::string_view model_id;
  std::array<double, kMetricCount> values;
};

/// The fourteen reported models.
std::span<const ModelRow> model_rows();

const ModelRow* find_row(std::string_view model_id);

/// Row as a MetricVector under the default bounds version.
MetricVector to_vector(const ModelRow& row);

std::vector<MetricVector> vectors();

/// Downstream policy success counts per 100 trials, tasks "task1"/"task2".
TaskResultLedger data_engine_ledger();
TaskResultLedger action_planner_ledger();

}  // namespace ewm::published
