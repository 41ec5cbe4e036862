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

#ifndef CASTBENCH_PROMPTS_HPP_
#define CASTBENCH_PROMPTS_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "castbench/error.hpp"
#include "castbench/types.hpp"

namespace castbench {

class Provider;

struct QueryConstraints {
  std::optional<std::string> tone;
  std::optional<std::size_t> max_bullets;
  std::optional<std::size_t> min_bullets;
  std::optional<std::string> perspective;
  std::optional<std::string> output_language;
  std::string raw_query;

  bool empty() const {
    return !tone && !max_bullets && !min_bullets && !perspective && !output_language;
  }
  bool operator==(const QueryConstraints&) const = default;
};

struct TopicCluster {
  std::string topic;
  std::vector<std::size_t> items;  // 1-based text item indices

  bool operator==(const TopicCluster&) const = default;
};

/// Intermediate commitments emitted before the final answer.
struct IntermediateStates {
  std::optional<std::string> domain;
  std::vector<std::string> topics;
  std::vector<TopicCluster> clusters;
  std::optional<TaggingMode> tagging_mode;
  std::vector<std::string> schema;
  /// Names of every intermediate field the response carried, in order.
  std::vector<std::string> field_names;
  /// Values of intermediate fields without a dedicated slot above.
  Json extra = Json::object();
};

struct ErrorRecord {
  std::string task_type;
  std::string error;
  ErrorCode kind = ErrorCode::kMalformedOutput;
};

/// One cell per text item; nullopt when the run produced no tag for it.
struct TagAssignments {
  std::vector<std::optional<std::string>> tags;
};

struct ParsedOutput {
  std::variant<SummaryOutput, TagAssignments, ErrorRecord> value;
  IntermediateStates intermediates;

  bool ok() const { return !std::holds_alternative<ErrorRecord>(value); }
  const SummaryOutput* summary() const { return std::get_if<SummaryOutput>(&value); }
  const TagAssignments* tags() const { return std::get_if<TagAssignments>(&value); }
  const ErrorRecord* error() const { return std::get_if<ErrorRecord>(&value); }
};

enum class ViolationKind { kCardinality, kOthersPosition, kWeightOrder, kLanguage };
std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct RefineResult {
  SummaryOutput output;
  std::vector<Violation> residual;
  bool llm_called = false;
};

/// Replaces {{NAME}} placeholders. Unknown placeholders are left in place.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Keeps lines between <!--tag--> and <!--/tag--> markers only when a tag of
/// the marker (comma separated) is enabled; drops <!--# ...--> comment lines;
/// renumbers "## N. " headings consecutively.
std::string select_sections(std::string_view tmpl, std::span<const std::string> enabled);

/// First well-formed JSON object in free text (code fences and prose allowed).
std::optional<Json> extract_json_object(std::string_view raw);

QueryConstraints decompose_query(std::string_view query);

struct CorpusInfo {
  std::string column_name;
  std::string query_language;
  std::string dataset_id;
};

Json build_input_payload(std::span<const std::string> corpus, std::string_view query,
                         const CorpusInfo& info);

/// Few-shot exemplars shipped with the repo (three per task family).
std::vector<Json> builtin_fewshot_examples(Task task);

PromptSpec build_summarization_prompt(std::span<const std::string> corpus,
                                      const QueryConstraints& constraints, Variant variant,
                                      const CorpusInfo& info = {},
                                      std::span<const Json> few_shot = {});

PromptSpec build_tagging_prompt(std::span<const std::string> items, std::string_view query,
                                std::optional<TaggingMode> mode_hint, Variant variant = Variant::kCast,
                                const CorpusInfo& info = {}, std::span<const Json> few_shot = {});

/// Summary documents also go through the intermediate-state guard when
/// require_intermediates is set: empty topics or clusters are rejected.
ParsedOutput parse_structured_output(std::string_view raw, Task task,
                                     std::size_t expected_items = 0,
                                     bool require_intermediates = false);

/// Parses an already-decoded document (used when reloading persisted runs).
ParsedOutput parse_document(const Json& doc, Task task, std::size_t expected_items = 0,
                            bool require_intermediates = false);

Json serialize_summary(const SummaryOutput& s);
Json serialize_error(const ErrorRecord& e);
Json serialize_intermediates(const IntermediateStates& s);
IntermediateStates deserialize_intermediates(const Json& j);

/// Canonical form of a multi-tag cell: trimmed, sorted, deduplicated, " | "-joined.
std::string canonical_tag_cell(std::span<const std::string> tags);

bool is_others_title(std::string_view title);

std::vector<Violation> validate_constraints(const SummaryOutput& out, const QueryConstraints& c,
                                            const IntermediateStates* intermediates = nullptr);

/// Deterministic repair first; then, if violations remain and a provider is
/// given, one repair call. Never increases the bullet count.
RefineResult refine_output(const SummaryOutput& out, const std::vector<Violation>& violations,
                           const QueryConstraints& c,
                           const IntermediateStates* intermediates = nullptr,
                           Provider* llm = nullptr, const DecodeParams& params = {});

}  // namespace castbench

#endif  // CASTBENCH_PROMPTS_HPP_
