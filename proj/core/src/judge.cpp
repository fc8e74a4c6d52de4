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
#include "ewm/judge.hpp"

#include <algorithm>
#include <cctype>
#include <nlohmann/json.hpp>

#include "ewm/digest.hpp"
#include "ewm/error.hpp"

namespace ewm {
namespace {

constexpr std::string_view kInstructionSlot = "VIDEO INSTRUCTION";

constexpr std::string_view kQualityExample = R"JSON({
  "Interaction_Quality": {
    "score": 2,
    "reason": "Object slides without friction during pushing; 
               gripper penetrates object slightly"
  },
  "Perspectivity": {
    "score": 4,
    "reason": "Stable camera perspective with consistent depth ordering"
  },
  "Instruction_Following": {
    "score": 1,
    "reason": "Video shows human hand instead of robotic arm (hallucination)"
  }
})JSON";

constexpr std::string_view kQualityHead = R"PROMPT(You are an expert evaluator for robot interaction videos. You are evaluating videos generated for **embodied AI manipulation scenarios**, specifically focusing on robotic arms interacting with objects in tabletop environments.

**EVALUATION CONTEXT:**
- Target scenario: Robotic manipulation (e.g., pick-place, push, grasp)
- Expected agent: **Robotic arm/end-effector**, NOT human hands
- Expected environment: Tabletop with objects, typical for robot manipulation tasks
- Expected physics: Realistic robot-object interactions following physical laws

**CRITICAL EVALUATION PRINCIPLES:**
1. Base ALL judgments ONLY on what is visually observable in the sampled frames
2. DO NOT infer information not shown (no assumptions about unseen parts)
3. Evaluate temporal coherence across the sampled frames
4. For instruction following: Compare STRICTLY against the provided text instruction

**EVALUATION DIMENSIONS & SCORING RUBRICS:**

1. Interaction_Quality (Quality of robot-object interactions)
   - Score 1: Objects pass through robot or other objects; no proper contact
   - Score 2: Contact exists but interaction is unrealistic (e.g., sliding without friction, incorrect force response)
   - Score 3: Mostly plausible interactions with minor issues (e.g., slight penetration, imperfect grasping)
   - Score 4: Realistic contact physics (proper friction, force transfer, object deformation)
   - Score 5: Perfect interaction physics; indistinguishable from real robot manipulation

2. PERSPECTIVITY (3D consistency and camera geometry)
   - Score 1: Scene has no coherent 3D structure; objects float inconsistently
   - Score 2: 3D structure is unstable (e.g., scale changes, incorrect occlusion)
   - Score 3: Reasonable 3D consistency with minor issues (e.g., slight perspective drift)
   - Score 4: Stable camera perspective with consistent depth relationships
   - Score 5: Perfect camera geometry and 3D consistency

3. INSTRUCTION FOLLOWING (Adherence to given instruction:**VIDEO INSTRUCTION**)
   - **HALLUCINATION CHECK**: If the video shows human hands instead of robotic arms, score ≤ 2 immediately
   - Score 1: Completely different from instruction (wrong action, wrong objects, wrong scene)
   - Score 2: Partially related but major errors (e.g., wrong target object, incorrect manipulation type)
   - Score 3: Follows general intent but with execution errors (e.g., correct action sequence but imprecise)
   - Score 4: Mostly correct with minor deviations (e.g., slight position error, extra unnecessary motion)
   - Score 5: Perfect execution of all specified elements (action, object, scene, outcome)

**SPECIFIC ROBOT-RELATED CHECKS:**
- Robotic arm should have mechanical appearance, NOT human limbs
- End-effector (gripper) should maintain consistent form throughout interaction
- Robot motion should show appropriate joint movement and kinematics
- Object manipulation should respect object mass and inertia
- Contact should be maintained appropriately during grasping/lifting

**OUTPUT FORMAT REQUIREMENTS:**
You MUST output a SINGLE, VALID JSON object with EXACTLY three keys:
- 'Interaction_Quality'
- 'Perspectivity'
- 'Instruction_Following'

Each value must be an object with exactly two keys:
- `"score"`: integer 1-5
- `"reason"`: concise explanation citing SPECIFIC visual evidence from frames

**EXAMPLE OUTPUT:**
)PROMPT";

constexpr std::string_view kQualityTail = R"PROMPT(

**CRITICAL INSTRUCTIONS:**
1. Output ONLY the JSON object, no other text
2. Base scoring on observed visual evidence only
3. For instruction following: Strictly compare with the provided instruction
4. Consider temporal coherence across all sampled frames
5. Penalize hallucinations (e.g., human hands instead of robot) heavily

Now evaluate the provided video frames based on the above criteria.)PROMPT";

constexpr std::string_view kPolicySlot = "{instruction}";

constexpr std::string_view kPolicyPrompt = R"PROMPT(You are a robot task execution judge. Please determine if the policy model correctly executed the instruction.

**Task Instruction**: {instruction}

**INPUT DESCRIPTION:**
- First 5 images: GT (Ground Truth) video frames (uniformly sampled: first frame, 3 middle frames, last frame), showing the correct task execution
- Last 5 images: Policy model generated video frames, showing the policy model's execution

**EVALUATION CRITERIA** (by priority):

1. Arm Selection - If the instruction explicitly requires left/right arm, the correct arm must be used, otherwise fail
2. Task Completion - Compare GT's final state with Policy's final state:
   - GT's final frame shows the completed task state
   - Policy's final frame should show a similar completion state
   - If Policy's final frame differs significantly from GT's final frame, judge as failure
3. Action Intent - Is Policy's entire motion process consistent with the instruction's semantic meaning?

**TOLERABLE DIFFERENCES:**
- Visual hallucinations from world model rendering (object deformation, color shifts)
- Minor differences in action trajectory
- Video length differences

**JUDGE AS SUCCESS (1):**
- Correct arm used
- Final state similar to GT (task basically completed)
- Correct action intent

**JUDGE AS FAILURE (0):**
- Wrong arm used
- Final state significantly different from GT (task not completed or completed incorrectly)
- Completely wrong action direction
- Grabbed/operated wrong object

Please carefully compare the **final frames** of GT and Policy to judge if the task is basically completed.

**OUTPUT FORMAT REQUIREMENTS:**
Please respond in this format:
thinking: [Analysis: 1. Is arm correct? 2. Compare final frame task completion states 3. Is action intent consistent?]
answer: [0 or 1])PROMPT";

void require_instruction(std::string_view instruction) {
  const bool blank = std::all_of(instruction.begin(), instruction.end(),
                                 [](unsigned char c) { return std::isspace(c) != 0; });
  if (blank) throw ValidationError("judge prompt: instruction must be non-empty");
}

std::string replace_once(std::string_view text, std::string_view slot, std::string_view value) {
  const auto pos = text.find(slot);
  std::string out(text.substr(0, pos));
  out += value;
  out += text.substr(pos + slot.size());
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Scans from `start` (an opening brace) to its balanced close, honouring
// string literals. Raw control characters inside strings are escaped so the
// result is valid JSON even when a model wraps a reason across lines.
std::optional<std::string> balanced_object(std::string_view raw, std::size_t start,
                                           std::size_t* end_out) {
  std::string out;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
        out.push_back(c);
      } else if (c == '\\') {
        escaped = true;
        out.push_back(c);
      } else if (c == '"') {
        in_string = false;
        out.push_back(c);
      } else if (c == '\n') {
        out += "\\n";
      } else if (c == '\r') {
        out += "\\r";
      } else if (c == '\t') {
        out += "\\t";
      } else {
        out.push_back(c);
      }
      continue;
    }
    out.push_back(c);
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) {
        if (end_out != nullptr) *end_out = i + 1;
        return out;
      }
    }
  }
  return std::nullopt;
}

DimensionVerdict parse_dimension(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key)) throw SchemaError(std::string("verdict is missing key ") + key);
  const auto& dim = obj.at(key);
  if (!dim.is_object()) throw SchemaError(std::string(key) + " must be an object");
  if (!dim.contains("score")) throw SchemaError(std::string(key) + " is missing \"score\"");
  if (!dim.contains("reason")) throw SchemaError(std::string(key) + " is missing \"reason\"");
  const auto& score = dim.at("score");
  if (!score.is_number_integer()) {
    throw SchemaError(std::string(key) + ".score must be an integer");
  }
  const auto value = score.get<long long>();
  if (value < 1 || value > 5) {
    throw RangeError(std::string(key) + ".score " + std::to_string(value) + " outside 1..5");
  }
  if (!dim.at("reason").is_string()) throw SchemaError(std::string(key) + ".reason must be a string");
  return {static_cast<int>(value), dim.at("reason").get<std::string>()};
}

std::size_t rfind_ci(std::string_view hay, std::string_view needle) {
  if (needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = hay.size() - needle.size() + 1; i-- > 0;) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size() && match; ++k) {
      match = std::tolower(static_cast<unsigned char>(hay[i + k])) == needle[k];
    }
    if (match) return i;
  }
  return std::string_view::npos;
}

}  // namespace

FrameSample sample_judge_frames(std::size_t frame_count, JudgeMode mode) {
  const std::size_t want = mode == JudgeMode::kQuality ? kQualityJudgeFrames : kPolicyJudgeFrames;
  FrameSample sample;
  if (frame_count < want) {
    sample.degraded = true;
    for (std::size_t i = 0; i < frame_count; ++i) sample.indices.push_back(i);
    return sample;
  }
  if (mode == JudgeMode::kPolicy) {
    // first, three quarter points, last
    sample.indices = {0, frame_count / 4, frame_count * 2 / 4, frame_count * 3 / 4, frame_count - 1};
    return sample;
  }
  for (std::size_t k = 0; k < want; ++k) {
    sample.indices.push_back(k * (frame_count - 1) / (want - 1));
  }
  return sample;
}

std::string_view quality_example_output() { return kQualityExample; }

std::string build_quality_prompt(std::string_view instruction) {
  require_instruction(instruction);
  std::string prompt = replace_once(kQualityHead, kInstructionSlot, instruction);
  prompt += kQualityExample;
  prompt += kQualityTail;
  return prompt;
}

std::string build_policy_prompt(std::string_view instruction) {
  require_instruction(instruction);
  return replace_once(kPolicyPrompt, kPolicySlot, instruction);
}

JudgeVerdict parse_quality_verdict(std::string_view raw, const ParseOptions& options) {
  std::string object_text;
  if (options.tolerant) {
    std::optional<std::string> found;
    for (auto pos = raw.find('{'); pos != std::string_view::npos && !found;
         pos = raw.find('{', pos + 1)) {
      found = balanced_object(raw, pos, nullptr);
    }
    if (!found) throw ParseError("judge response contains no JSON object");
    object_text = std::move(*found);
  } else {
    const auto body = trim(raw);
    std::size_t end = 0;
    auto found = body.empty() || body.front() != '{' ? std::nullopt : balanced_object(body, 0, &end);
    if (!found || end != body.size()) {
      throw ParseError("judge response is not a single JSON object (strict mode)");
    }
    object_text = std::move(*found);
  }

  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(object_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("judge response JSON is malformed: ") + e.what());
  }
  if (!obj.is_object()) throw SchemaError("judge verdict must be a JSON object");

  JudgeVerdict verdict;
  verdict.kind = VerdictKind::kQuality;
  verdict.interaction_quality = parse_dimension(obj, "Interaction_Quality");
  verdict.perspectivity = parse_dimension(obj, "Perspectivity");
  verdict.instruction_following = parse_dimension(obj, "Instruction_Following");
  if (obj.size() != 3) throw SchemaError("judge verdict must contain exactly three keys");
  verdict.raw_response = std::string(raw);
  return verdict;
}

JudgeVerdict parse_policy_verdict(std::string_view raw) {
  constexpr std::string_view kAnswer = "answer:";
  constexpr std::string_view kThinking = "thinking:";
  const auto at = rfind_ci(raw, kAnswer);
  if (at == std::string_view::npos) throw ParseError("policy verdict has no \"answer:\" token");

  auto rest = trim(raw.substr(at + kAnswer.size()));
  const auto stop = rest.find_first_of(" \t\r\n");
  auto token = rest.substr(0, stop);
  const auto strip = [](std::string_view& t, std::string_view chars) {
    while (!t.empty() && chars.find(t.front()) != std::string_view::npos) t.remove_prefix(1);
    while (!t.empty() && chars.find(t.back()) != std::string_view::npos) t.remove_suffix(1);
  };
  strip(token, "[]*\"'`.");
  if (token != "0" && token != "1") {
    throw RangeError("policy answer must be 0 or 1, got \"" + std::string(token) + "\"");
  }

  JudgeVerdict verdict;
  verdict.kind = VerdictKind::kPolicy;
  verdict.success = token == "1";
  const auto head = raw.substr(0, at);
  const auto think = rfind_ci(head, kThinking);
  if (think != std::string_view::npos) {
    verdict.thinking = std::string(trim(head.substr(think + kThinking.size())));
  }
  verdict.raw_response = std::string(raw);
  return verdict;
}

void JudgeRequest::validate() const {
  require_instruction(instruction);
  if (prompt_kind == JudgeMode::kQuality) {
    if (frames.empty() || frames.size() > kQualityJudgeFrames) {
      throw ValidationError("quality judge request needs 1.." +
                            std::to_string(kQualityJudgeFrames) + " frames");
    }
  } else if (gt_frames.size() != kPolicyJudgeFrames || policy_frames.size() != kPolicyJudgeFrames) {
    throw ValidationError("policy judge request needs exactly 5 GT and 5 policy frames");
  }
}

std::string JudgeRequest::prompt() const {
  return prompt_kind == JudgeMode::kQuality ? build_quality_prompt(instruction)
                                            : build_policy_prompt(instruction);
}

std::vector<EncodedImage> JudgeRequest::images() const {
  if (prompt_kind == JudgeMode::kQuality) return frames;
  std::vector<EncodedImage> out = gt_frames;
  out.insert(out.end(), policy_frames.begin(), policy_frames.end());
  return out;
}

std::string JudgeRequest::body() const {
  nlohmann::json j;
  j["model"] = model_name;
  j["prompt"] = prompt();
  j["images"] = images();
  return j.dump();
}

std::string JudgeRequest::digest() const { return sha256_hex(body()); }

}  // namespace ewm
