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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ewm {

enum class VerdictKind : std::uint8_t { kQuality, kPolicy };
enum class Provenance : std::uint8_t { kLive, kReplay };

struct DimensionVerdict {
  int score = 0;
  std::string reason;
  bool operator==(const DimensionVerdict&) const = default;
};

/// Parsed and schema-checked judge output. Quality verdicts populate the three
/// Likert dimensions; policy verdicts populate `success` and `thinking`.
struct JudgeVerdict {
  VerdictKind kind = VerdictKind::kQuality;
  DimensionVerdict interaction_quality;
  DimensionVerdict perspectivity;
  DimensionVerdict instruction_following;
  bool success = false;
  std::string thinking;
  Provenance provenance = Provenance::kLive;
  std::string raw_response;
};

inline constexpr std::size_t kQualityJudgeFrames = 8;
inline constexpr std::size_t kPolicyJudgeFrames = 5;

enum class JudgeMode : std::uint8_t { kQuality, kPolicy };

struct FrameSample {
  std::vector<std::size_t> indices;
  bool degraded = false;  // fewer frames than requested were available
};

/// Uniform frame subset for a judge request; always keeps first and last.
FrameSample sample_judge_frames(std::size_t frame_count, JudgeMode mode);

std::string build_quality_prompt(std::string_view instruction);
/// The example verdict embedded in the quality prompt.
std::string_view quality_example_output();
std::string build_policy_prompt(std::string_view instruction);

struct ParseOptions {
  /// When false the response must be exactly one JSON object (whitespace
  /// aside); when true the first balanced object is extracted from any
  /// surrounding prose or code fences.
  bool tolerant = true;
};

JudgeVerdict parse_quality_verdict(std::string_view raw, const ParseOptions& options = {});
JudgeVerdict parse_policy_verdict(std::string_view raw);

/// One encoded image in a judge request (a base64 PNG data URI).
using EncodedImage = std::string;

struct JudgeRequest {
  std::string endpoint;
  std::string model_name;
  JudgeMode prompt_kind = JudgeMode::kQuality;
  std::string instruction;
  std::vector<EncodedImage> frames;         // quality requests: 8 frames
  std::vector<EncodedImage> gt_frames;      // policy requests: 5 GT frames
  std::vector<EncodedImage> policy_frames;  // policy requests: 5 rollout frames

  /// Throws ValidationError if the frame counts break the request contract.
  void validate() const;
  std::string prompt() const;
  /// Images in wire order (GT first for policy requests).
  std::vector<EncodedImage> images() const;
  /// Wire body {model, prompt, images}.
  std::string body() const;
  /// SHA-256 hex of the wire body.
  std::string digest() const;
};

struct TransportOptions {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::seconds timeout{60};
};

/// Reads JUDGE_TIMEOUT_S when set.
TransportOptions transport_options_from_env();

/// POSTs the request once per attempt and returns the response body
/// unmodified. Transport failures and HTTP 5xx are retried with exponential
/// backoff; HTTP 4xx raises ProtocolError immediately.
std::string invoke_judge(const JudgeRequest& request, const TransportOptions& options = {});

/// Pulls the `content` string out of a wire response body.
std::string response_content(std::string_view body);

/// Encodes an RGB8 frame as a base64 PNG data URI.
EncodedImage encode_png_data_uri(const std::uint8_t* rgb, std::size_t height, std::size_t width);

std::string base64_encode(std::string_view bytes);

}  // namespace ewm
