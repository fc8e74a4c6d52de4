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
#include "ewm/csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ewm/error.hpp"

namespace ewm {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Header name -> column index; every name in `required` must be present.
struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;
  std::string kind;

  const std::string& get(std::size_t row, const std::string& name) const {
    return rows[row][columns.at(name)];
  }
  std::string where(std::size_t row) const { return kind + " row " + std::to_string(row + 2); }
};

Table load_table(std::string_view text, std::string kind, std::initializer_list<const char*> required) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw SchemaError(kind + " CSV is empty");
  Table t;
  t.kind = std::move(kind);
  for (std::size_t i = 0; i < rows[0].size(); ++i) t.columns[trim(rows[0][i])] = i;
  for (const char* name : required) {
    if (!t.columns.contains(name)) {
      throw SchemaError(t.kind + " CSV lacks column \"" + std::string(name) + "\"");
    }
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && trim(rows[r][0]).empty()) continue;
    if (rows[r].size() != rows[0].size()) {
      throw SchemaError(t.kind + " row " + std::to_string(r + 1) + " has " +
                        std::to_string(rows[r].size()) + " fields, header has " +
                        std::to_string(rows[0].size()));
    }
    for (auto& f : rows[r]) f = trim(f);
    t.rows.push_back(std::move(rows[r]));
  }
  return t;
}

long parse_integer(const std::string& s, const std::string& where) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(where + ": \"" + s + "\" is not an integer");
  }
  return v;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError("CSV ends inside a quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<HumanRating> parse_human_csv(std::string_view text) {
  const auto t = load_table(text, "human", {"video_id", "model_id", "dimension", "likert"});
  std::vector<HumanRating> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    HumanRating h;
    h.video_id = t.get(r, "video_id");
    h.model_id = t.get(r, "model_id");
    const auto dim = parse_human_dimension(t.get(r, "dimension"));
    if (!dim) throw SchemaError(t.where(r) + ": unknown dimension \"" + t.get(r, "dimension") + "\"");
    h.dimension = *dim;
    const long likert = parse_integer(t.get(r, "likert"), t.where(r));
    if (likert < 1 || likert > 5) throw RangeError(t.where(r) + ": likert outside 1..5");
    h.likert = static_cast<int>(likert);
    if (h.video_id.empty() || h.model_id.empty()) {
      throw SchemaError(t.where(r) + ": empty video_id or model_id");
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<PairwiseComparison> parse_pairwise_csv(std::string_view text) {
  const auto t = load_table(text, "pairwise", {"model_a", "model_b", "video_id", "winner"});
  std::vector<PairwiseComparison> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    PairwiseComparison c;
    c.model_a = t.get(r, "model_a");
    c.model_b = t.get(r, "model_b");
    c.video_id = t.get(r, "video_id");
    const auto& w = t.get(r, "winner");
    if (w == "a") {
      c.winner = Winner::kA;
    } else if (w == "b") {
      c.winner = Winner::kB;
    } else if (w == "tie") {
      c.winner = Winner::kTie;
    } else {
      throw SchemaError(t.where(r) + ": winner must be a, b or tie");
    }
    if (c.model_a.empty() || c.model_a == c.model_b) {
      throw SchemaError(t.where(r) + ": model_a and model_b must be distinct ids");
    }
    out.push_back(std::move(c));
  }
  return out;
}

TaskResultLedger parse_ledger_csv(std::string_view text) {
  const auto t = load_table(text, "ledger", {"model_id", "task_id", "trials", "successes", "role"});
  TaskResultLedger ledger;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    TaskResult e;
    e.model_id = t.get(r, "model_id");
    e.task_id = t.get(r, "task_id");
    e.trials = parse_integer(t.get(r, "trials"), t.where(r));
    e.successes = parse_integer(t.get(r, "successes"), t.where(r));
    const auto role = parse_task_role(t.get(r, "role"));
    if (!role) throw SchemaError(t.where(r) + ": unknown role \"" + t.get(r, "role") + "\"");
    e.role = *role;
    ledger.entries.push_back(std::move(e));
  }
  ledger.validate();
  return ledger;
}

std::vector<HumanRating> read_human_csv(const std::filesystem::path& path) {
  return parse_human_csv(slurp(path));
}

std::vector<PairwiseComparison> read_pairwise_csv(const std::filesystem::path& path) {
  return parse_pairwise_csv(slurp(path));
}

TaskResultLedger read_ledger_csv(const std::filesystem::path& path) {
  return parse_ledger_csv(slurp(path));
}

std::string ledger_to_csv(const TaskResultLedger& ledger) {
  std::string out = "model_id,task_id,trials,successes,role\n";
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  for (const auto& e : ledger.entries) {
    out += field(e.model_id) + "," + field(e.task_id) + "," + std::to_string(e.trials) + "," +
           std::to_string(e.successes) + "," + std::string(task_role_name(e.role)) + "\n";
  }
  return out;
}

}  // namespace ewm
