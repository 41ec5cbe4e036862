// Copyright 2026 The castbench Authors.
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

#ifndef CASTBENCH_TYPES_HPP_
#define CASTBENCH_TYPES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace castbench {

using Json = nlohmann::ordered_json;

struct BulletItem {
  std::string title;
  std::string description;
  std::vector<std::string> topic_words;
  std::size_t position = 0;

  bool operator==(const BulletItem&) const = default;
};

struct Perspective {
  std::size_t num_topics = 0;
  std::vector<std::string> top_words;

  bool operator==(const Perspective&) const = default;
};

/// Parsed structured summary (the "Summary" output document).
struct SummaryOutput {
  std::string task_type = "Summary";
  std::string output_language;
  std::string column_name;
  std::optional<std::string> domain;
  std::optional<Perspective> perspective;
  std::vector<BulletItem> results;

  bool operator==(const SummaryOutput&) const = default;
};

enum class Variant { kCast, kApOnly, kTbsOnly, kZeroshotCot, kFewshotCot };

enum class Task {
  kSummarize,
  kTagIndependent,
  kTagJoint,
  kTag,  // mode left to the model
  kJudgeSimilarity,
  kJudgeClusters,
  kRepair,
};

enum class TaggingMode { kIndependent, kJoint };

std::string_view to_string(Variant v);
std::string_view to_string(Task t);
std::string_view to_string(TaggingMode m);
Variant parse_variant(std::string_view s);
Task parse_task(std::string_view s);
TaggingMode parse_tagging_mode(std::string_view s);

bool uses_algorithmic_prompting(Variant v);
bool uses_thinking_before_speaking(Variant v);
bool is_tagging(Task t);

struct PromptSpec {
  Variant variant = Variant::kCast;
  Task task = Task::kSummarize;
  std::string rendered_text;
  Json input_payload;
  std::vector<Json> few_shot_examples;
  // Not part of the rendered text; lets offline providers key canned answers.
  std::string dataset_id;
};

struct DecodeParams {
  double temperature = 0.0;
  std::int64_t seed = 42;
  std::optional<std::size_t> max_tokens;
  double timeout_s = 300.0;
};

struct CompletionResult {
  std::string text;
  double latency_s = 0.0;
  std::string provider;
  std::size_t attempt_count = 1;
};

}  // namespace castbench

#endif  // CASTBENCH_TYPES_HPP_
