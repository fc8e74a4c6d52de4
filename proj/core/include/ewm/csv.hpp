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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ewm/analysis.hpp"
#include "ewm/scoring.hpp"

namespace ewm {

/// RFC 4180 rows. Quoted fields may contain commas, quotes and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::vector<HumanRating> parse_human_csv(std::string_view text);
std::vector<PairwiseComparison> parse_pairwise_csv(std::string_view text);
TaskResultLedger parse_ledger_csv(std::string_view text);

std::vector<HumanRating> read_human_csv(const std::filesystem::path& path);
std::vector<PairwiseComparison> read_pairwise_csv(const std::filesystem::path& path);
TaskResultLedger read_ledger_csv(const std::filesystem::path& path);

std::string ledger_to_csv(const TaskResultLedger& ledger);

}  // namespace ewm
