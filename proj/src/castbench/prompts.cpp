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

#include "castbench/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "castbench/assets.hpp"
#include "castbench/llm_client.hpp"
#include "castbench/text.hpp"

namespace castbench {

// ---------------------------------------------------------------------------
// Enum names

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kCast: return "cast";
    case Variant::kApOnly: return "ap_only";
    case Variant::kTbsOnly: return "tbs_only";
    case Variant::kZeroshotCot: return "zeroshot_cot";
    case Variant::kFewshotCot: return "fewshot_cot";
  }
  return "cast";
}

std::string_view to_string(Task t) {
  switch (t) {
    case Task::kSummarize: return "summarize";
    case Task::kTagIndependent: return "tag_independent";
    case Task::kTagJoint: return "tag_joint";
    case Task::kTag: return "tag";
    case Task::kJudgeSimilarity: return "judge_similarity";
    case Task::kJudgeClusters: return "judge_clusters";
    case Task::kRepair: return "repair";
  }
  return "summarize";
}

std::string_view to_string(TaggingMode m) {
  return m == TaggingMode::kJoint ? "joint" : "independent";
}

Variant parse_variant(std::string_view s) {
  for (Variant v : {Variant::kCast, Variant::kApOnly, Variant::kTbsOnly, Variant::kZeroshotCot,
                    Variant::kFewshotCot}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::kConfig, fmt::format("unknown prompt variant '{}'", s));
}

Task parse_task(std::string_view s) {
  for (Task t : {Task::kSummarize, Task::kTagIndependent, Task::kTagJoint, Task::kTag,
                 Task::kJudgeSimilarity, Task::kJudgeClusters, Task::kRepair}) {
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorCode::kConfig, fmt::format("unknown task '{}'", s));
}

TaggingMode parse_tagging_mode(std::string_view s) {
  const std::string n = text::normalize(s);
  if (n == "joint" || n == "joint tagging") return TaggingMode::kJoint;
  if (n == "independent" || n == "independent tagging") return TaggingMode::kIndependent;
  throw Error(ErrorCode::kConfig, fmt::format("unknown tagging mode '{}'", s));
}

bool uses_algorithmic_prompting(Variant v) { return v == Variant::kCast || v == Variant::kApOnly; }

bool uses_thinking_before_speaking(Variant v) {
  return v == Variant::kCast || v == Variant::kTbsOnly;
}

bool is_tagging(Task t) {
  return t == Task::kTagIndependent || t == Task::kTagJoint || t == Task::kTag;
}

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kCardinality: return "cardinality";
    case ViolationKind::kOthersPosition: return "others-position";
    case ViolationKind::kWeightOrder: return "weight-order";
    case ViolationKind::kLanguage: return "language";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Templates

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const auto open = tmpl.find("{{", i);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    out.append(tmpl.substr(i, open - i));
    const std::string name(tmpl.substr(open + 2, close - open - 2));
    const auto it = values.find(name);
    if (it != values.end()) {
      out.append(it->second);
    } else {
      out.append(tmpl.substr(open, close + 2 - open));
    }
    i = close + 2;
  }
  return out;
}

std::string select_sections(std::string_view tmpl, std::span<const std::string> enabled) {
  static const std::regex open_marker(R"(^<!--([a-z_,]+)-->$)");
  static const std::regex close_marker(R"(^<!--/([a-z_,]+)-->$)");
  static const std::regex comment_marker(R"(^<!--#.*-->$)");
  static const std::regex numbered_heading(R"(^## \d+\. (.*)$)");

  auto is_enabled = [&](const std::string& tags) {
    std::size_t start = 0;
    while (start <= tags.size()) {
      auto end = tags.find(',', start);
      if (end == std::string::npos) end = tags.size();
      const std::string tag = tags.substr(start, end - start);
      if (std::find(enabled.begin(), enabled.end(), tag) != enabled.end()) return true;
      start = end + 1;
    }
    return false;
  };

  std::vector<bool> stack;
  std::string out;
  int heading = 0;
  std::size_t pos = 0;
  while (pos <= tmpl.size()) {
    auto end = tmpl.find('\n', pos);
    const bool last = end == std::string_view::npos;
    if (last) end = tmpl.size();
    const std::string line(tmpl.substr(pos, end - pos));
    pos = end + 1;
    std::smatch m;
    if (std::regex_match(line, m, open_marker)) {
      stack.push_back(is_enabled(m[1].str()));
    } else if (std::regex_match(line, m, close_marker)) {
      require(!stack.empty(), "template has an unbalanced close marker");
      stack.pop_back();
    } else if (std::regex_match(line, comment_marker)) {
      // dropped
    } else if (std::all_of(stack.begin(), stack.end(), [](bool b) { return b; })) {
      if (std::regex_match(line, m, numbered_heading)) {
        out += fmt::format("## {}. {}", ++heading, m[1].str());
      } else {
        out += line;
      }
      if (!last) out += '\n';
    }
    if (last) break;
  }
  require(stack.empty(), "template has an unclosed section marker");
  std::string collapsed;
  collapsed.reserve(out.size());
  std::size_t newlines = 0;
  for (char c : out) {
    newlines = c == '\n' ? newlines + 1 : 0;
    if (newlines <= 2) collapsed.push_back(c);
  }
  return collapsed;
}

std::optional<Json> extract_json_object(std::string_view raw) {
  for (std::size_t start = raw.find('{'); start != std::string_view::npos;
       start = raw.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      const char c = raw[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}' && --depth == 0) {
        Json doc = Json::parse(raw.substr(start, i - start + 1), nullptr, false, true);
        if (!doc.is_discarded() && doc.is_object()) return doc;
        break;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Query decomposition

namespace {

const std::map<std::string, std::size_t>& number_words() {
  static const std::map<std::string, std::size_t> words = {
      {"one", 1},       {"two", 2},       {"three", 3},     {"four", 4},       {"five", 5},
      {"six", 6},       {"seven", 7},     {"eight", 8},     {"nine", 9},       {"ten", 10},
      {"eleven", 11},   {"twelve", 12},   {"thirteen", 13}, {"fourteen", 14},  {"fifteen", 15},
      {"sixteen", 16},  {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19}, {"twenty", 20}};
  return words;
}

const std::map<std::string, std::string>& language_names() {
  static const std::map<std::string, std::string> names = {
      {"english", "en"},    {"chinese", "zh"},    {"french", "fr"},   {"german", "de"},
      {"spanish", "es"},    {"portuguese", "pt"}, {"italian", "it"},  {"japanese", "ja"},
      {"korean", "ko"},     {"russian", "ru"},    {"arabic", "ar"},   {"indonesian", "id"},
      {"vietnamese", "vi"}, {"polish", "pl"},     {"dutch", "nl"},    {"turkish", "tr"}};
  return names;
}

const std::string kNumber =
    "(\\d+|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|fourteen|"
    "fifteen|sixteen|seventeen|eighteen|nineteen|twenty)";

std::size_t to_number(const std::string& token) {
  const auto& words = number_words();
  if (const auto it = words.find(token); it != words.end()) return it->second;
  return static_cast<std::size_t>(std::stoul(token));
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Finds the first match and returns its first group, then blanks the match so
// later patterns cannot reuse it.
std::optional<std::string> take(std::string& haystack, const std::regex& re) {
  std::smatch m;
  if (!std::regex_search(haystack, m, re)) return std::nullopt;
  std::string group = m[1].str();
  const auto offset = static_cast<std::size_t>(m.position(0));
  const auto length = static_cast<std::size_t>(m.length(0));
  haystack.replace(offset, length, std::string(length, ' '));
  return group;
}

}  // namespace

QueryConstraints decompose_query(std::string_view query) {
  QueryConstraints c;
  c.raw_query = std::string(query);
  const std::string original = ascii_lower(query);
  std::string q = original;
  std::smatch m;

  static const std::regex at_most("\\b(?:no more than|not more than|at most|up to|a maximum of|"
                                  "maximum of|no greater than)\\s+" + kNumber + "\\b");
  static const std::regex below("\\b(?:less than|fewer than|under)\\s+" + kNumber + "\\b");
  static const std::regex at_least("\\b(?:at least|no fewer than|no less than|a minimum of|"
                                   "minimum of)\\s+" + kNumber + "\\b");
  static const std::regex above("\\bmore than\\s+" + kNumber + "\\b");
  static const std::regex exact("\\b(?:exactly\\s+)?" + kNumber +
                                "\\s+(?:main\\s+|key\\s+|major\\s+)?(?:bullet points?|bullets?|"
                                "points|themes|topics)\\b");

  // Negated phrasings ("no more than", "no fewer than") are consumed before the bare comparatives.
  if (auto hit = take(q, at_most)) c.max_bullets = to_number(*hit);
  if (auto hit = take(q, at_least)) c.min_bullets = to_number(*hit);
  if (!c.max_bullets) {
    if (auto hit = take(q, below)) {
      const std::size_t n = to_number(*hit);
      c.max_bullets = n > 0 ? n - 1 : 0;
    }
  }
  if (!c.min_bullets) {
    if (auto hit = take(q, above)) c.min_bullets = to_number(*hit) + 1;
  }
  if (!c.max_bullets && !c.min_bullets) {
    if (auto hit = take(q, exact)) {
      c.max_bullets = c.min_bullets = to_number(*hit);
    }
  }
  if (c.min_bullets && c.max_bullets && *c.min_bullets > *c.max_bullets) c.min_bullets.reset();

  static const std::regex tone(
      R"(\b(?:in|with|using|by using)\s+(?:an?\s+|the\s+)?([a-z][a-z-]*)\s+(?:tone|style|voice)\b)");
  if (std::regex_search(original, m, tone)) c.tone = m[1].str();

  static const std::regex perspective_of(
      R"(\bfrom\s+the\s+perspective\s+of\s+(?:an?\s+|the\s+)?([a-z][a-z -]*[a-z]))");
  static const std::regex perspective(R"(\bfrom\s+(?:an?\s+|the\s+)?([a-z][a-z -]*?)\s+perspective\b)");
  if (std::regex_search(original, m, perspective_of)) {
    c.perspective = m[1].str();
  } else if (std::regex_search(original, m, perspective)) {
    c.perspective = m[1].str();
  }

  static const std::regex language(
      R"(\b(?:in|into|using)\s+(english|chinese|french|german|spanish|portuguese|italian|japanese|korean|russian|arabic|indonesian|vietnamese|polish|dutch|turkish)\b)");
  if (std::regex_search(original, m, language)) c.output_language = language_names().at(m[1].str());
  return c;
}

// ---------------------------------------------------------------------------
// Prompt construction

Json build_input_payload(std::span<const std::string> corpus, std::string_view query,
                         const CorpusInfo& info) {
  Json items = Json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    items.push_back(fmt::format("[{}] {}", i + 1, corpus[i]));
  }
  return Json{{"UserQuery", std::string(query)},
              {"QueryLanguage", info.query_language.empty() ? "en_US" : info.query_language},
              {"ColumnName", info.column_name},
              {"TextItems", std::move(items)}};
}

std::vector<Json> builtin_fewshot_examples(Task task) {
  const Json all = Json::parse(assets::get("fewshot_examples.json"));
  const char* key = is_tagging(task) ? "tag" : "summarize";
  std::vector<Json> out;
  for (const auto& e : all.at(key)) out.push_back(e);
  return out;
}

namespace {

std::vector<std::string> section_tags(Variant variant) {
  std::vector<std::string> tags;
  if (uses_algorithmic_prompting(variant)) tags.emplace_back("ap");
  if (uses_thinking_before_speaking(variant)) tags.emplace_back("tbs");
  if (tags.empty()) tags.emplace_back("cot");
  if (variant == Variant::kFewshotCot) tags.emplace_back("fewshot");
  return tags;
}

std::string dump(const Json& j, int indent = 2) {
  return j.dump(indent, ' ', false, Json::error_handler_t::replace);
}

std::string render_examples(std::span<const Json> examples) {
  std::string out = "# Examples";
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out += fmt::format("\n\n## Example {}\nInput:\n```json\n{}\n```\nOutput:\n```json\n{}\n```", i + 1,
                       dump(examples[i].at("input")), dump(examples[i].at("output")));
  }
  return out;
}

std::string render_constraints(const QueryConstraints& c) {
  std::string out = "# Extracted Constraints\n";
  if (c.max_bullets) out += fmt::format("- Maximum number of bullet points: {}\n", *c.max_bullets);
  if (c.min_bullets) out += fmt::format("- Minimum number of bullet points: {}\n", *c.min_bullets);
  if (c.tone) out += fmt::format("- Tone: {}\n", *c.tone);
  if (c.perspective) out += fmt::format("- Perspective: {}\n", *c.perspective);
  if (c.output_language) out += fmt::format("- Output language: {}\n", *c.output_language);
  return out;
}

std::string assemble(std::string body, const QueryConstraints* constraints, const Json& payload) {
  while (!body.empty() && body.back() == '\n') body.pop_back();
  std::string out = std::move(body);
  if (constraints && !constraints->empty()) out += "\n\n" + render_constraints(*constraints);
  while (!out.empty() && out.back() == '\n') out.pop_back();
  out += "\n\n# Input\n```json\n" + dump(payload) + "\n```\n";
  return out;
}

}  // namespace

PromptSpec build_summarization_prompt(std::span<const std::string> corpus,
                                      const QueryConstraints& constraints, Variant variant,
                                      const CorpusInfo& info, std::span<const Json> few_shot) {
  require(!corpus.empty(), "build_summarization_prompt: empty corpus");
  PromptSpec p;
  p.variant = variant;
  p.task = Task::kSummarize;
  p.dataset_id = info.dataset_id;
  p.input_payload = build_input_payload(corpus, constraints.raw_query, info);
  if (variant == Variant::kFewshotCot) {
    p.few_shot_examples = few_shot.empty() ? builtin_fewshot_examples(Task::kSummarize)
                                           : std::vector<Json>(few_shot.begin(), few_shot.end());
  }
  const auto tags = section_tags(variant);
  std::string body = select_sections(assets::get("templates/summarize.md"), tags);
  body = render_template(body, {{"EXAMPLES", render_examples(p.few_shot_examples)}});
  p.rendered_text =
      assemble(std::move(body), uses_algorithmic_prompting(variant) ? &constraints : nullptr,
               p.input_payload);
  return p;
}

PromptSpec build_tagging_prompt(std::span<const std::string> items, std::string_view query,
                                std::optional<TaggingMode> mode_hint, Variant variant,
                                const CorpusInfo& info, std::span<const Json> few_shot) {
  require(!items.empty(), "build_tagging_prompt: no items");
  PromptSpec p;
  p.variant = variant;
  p.task = !mode_hint ? Task::kTag
           : *mode_hint == TaggingMode::kJoint ? Task::kTagJoint
                                               : Task::kTagIndependent;
  p.dataset_id = info.dataset_id;
  p.input_payload = build_input_payload(items, query, info);
  if (variant == Variant::kFewshotCot) {
    p.few_shot_examples = few_shot.empty() ? builtin_fewshot_examples(Task::kTag)
                                           : std::vector<Json>(few_shot.begin(), few_shot.end());
  }
  std::string hint;
  if (mode_hint) {
    hint = fmt::format("The user query requires {} Tagging.",
                       *mode_hint == TaggingMode::kJoint ? "Joint" : "Independent");
  } else {
    hint = "Choose the mode from the user query before tagging.";
  }
  std::string body = select_sections(assets::get("templates/tagging.md"), section_tags(variant));
  body = render_template(body, {{"EXAMPLES", render_examples(p.few_shot_examples)},
                                {"ITEM_COUNT", std::to_string(items.size())},
                                {"MODE_HINT", hint}});
  p.rendered_text = assemble(std::move(body), nullptr, p.input_payload);
  return p;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

const std::set<std::string>& summary_core_keys() {
  static const std::set<std::string> keys = {"TaskType", "OutputLanguage", "ColumnName", "Results",
                                             "Error"};
  return keys;
}

const std::set<std::string>& tagging_core_keys() {
  static const std::set<std::string> keys = {"TaskType", "OutputLanguage", "ColumnName", "Tags",
                                             "Error"};
  return keys;
}

std::string as_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return "";
  return dump(j, -1);
}

std::vector<std::string> string_list(const Json& j) {
  std::vector<std::string> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(as_text(e));
  } else if (j.is_string()) {
    out.push_back(j.get<std::string>());
  }
  return out;
}

ParsedOutput failure(const char* task_type, ErrorCode kind, std::string message,
                     IntermediateStates states = {}) {
  return ParsedOutput{ErrorRecord{task_type, std::move(message), kind}, std::move(states)};
}

ParsedOutput parse_summary(const Json& doc, bool require_intermediates) {
  IntermediateStates states;
  const bool explicit_clusters = doc.contains("Clusters");
  for (const auto& [key, value] : doc.items()) {
    if (summary_core_keys().count(key)) continue;
    states.field_names.push_back(key);
    if (key == "Domain") {
      states.domain = as_text(value);
    } else if (key == "Perspective" && value.is_object()) {
      states.topics = string_list(value.value("TopWords", Json::array()));
    } else if (key == "Clusters" && value.is_array()) {
      for (const auto& c : value) {
        TopicCluster tc;
        tc.topic = as_text(c.value("Topic", Json()));
        if (c.contains("Items") && c["Items"].is_array()) {
          for (const auto& i : c["Items"]) {
            if (i.is_number_integer() && i.get<long long>() > 0) {
              tc.items.push_back(static_cast<std::size_t>(i.get<long long>()));
            }
          }
        }
        states.clusters.push_back(std::move(tc));
      }
    } else {
      states.extra[key] = value;
    }
  }

  if (doc.contains("Error")) {
    return failure("Summary", ErrorCode::kSchemaViolation,
                   "model reported an error: " + as_text(doc["Error"]), std::move(states));
  }
  if (doc.contains("TaskType") && as_text(doc["TaskType"]) != "Summary") {
    return failure("Summary", ErrorCode::kSchemaViolation,
                   "TaskType is '" + as_text(doc["TaskType"]) + "', expected 'Summary'",
                   std::move(states));
  }
  if (!doc.contains("Results") || !doc["Results"].is_array()) {
    return failure("Summary", ErrorCode::kSchemaViolation, "missing required field 'Results'",
                   std::move(states));
  }
  if (doc["Results"].empty()) {
    return failure("Summary", ErrorCode::kSchemaViolation, "'Results' is empty", std::move(states));
  }

  SummaryOutput s;
  s.output_language = as_text(doc.value("OutputLanguage", Json("")));
  s.column_name = as_text(doc.value("ColumnName", Json("")));
  s.domain = states.domain;
  if (doc.contains("Perspective") && doc["Perspective"].is_object()) {
    Perspective p;
    const Json& pj = doc["Perspective"];
    if (pj.contains("NumTopics") && pj["NumTopics"].is_number_integer() &&
        pj["NumTopics"].get<long long>() >= 0) {
      p.num_topics = static_cast<std::size_t>(pj["NumTopics"].get<long long>());
    }
    p.top_words = states.topics;
    s.perspective = std::move(p);
  }
  for (std::size_t i = 0; i < doc["Results"].size(); ++i) {
    const Json& r = doc["Results"][i];
    if (!r.is_object() || !r.contains("Title") || text::trim(as_text(r["Title"])).empty()) {
      return failure("Summary", ErrorCode::kSchemaViolation,
                     fmt::format("Results[{}] lacks a non-empty 'Title'", i), std::move(states));
    }
    BulletItem b;
    b.title = as_text(r["Title"]);
    b.description = as_text(r.value("Description", Json("")));
    b.topic_words = string_list(r.value("TopicWords", Json::array()));
    b.position = i;
    s.results.push_back(std::move(b));
  }

  if (!explicit_clusters) {
    for (const auto& b : s.results) {
      if (!b.topic_words.empty()) states.clusters.push_back({b.title, {}});
    }
  }
  if (require_intermediates && (states.topics.empty() || states.clusters.empty())) {
    return failure("Summary", ErrorCode::kSchemaViolation,
                   states.topics.empty() ? "intermediate state 'topics' is empty"
                                         : "intermediate state 'clusters' is empty",
                   std::move(states));
  }
  return ParsedOutput{std::move(s), std::move(states)};
}

ParsedOutput parse_tags(const Json& doc, std::size_t expected_items) {
  IntermediateStates states;
  for (const auto& [key, value] : doc.items()) {
    if (tagging_core_keys().count(key)) continue;
    states.field_names.push_back(key);
    if (key == "Domain") {
      states.domain = as_text(value);
    } else if (key == "TaggingMode") {
      const std::string mode = text::normalize(as_text(value));
      if (mode.find("joint") != std::string::npos) {
        states.tagging_mode = TaggingMode::kJoint;
      } else if (mode.find("independent") != std::string::npos) {
        states.tagging_mode = TaggingMode::kIndependent;
      }
    } else if (key == "TagSchema") {
      states.schema = string_list(value);
    } else {
      states.extra[key] = value;
    }
  }
  if (doc.contains("Error")) {
    return failure("Tagging", ErrorCode::kSchemaViolation,
                   "model reported an error: " + as_text(doc["Error"]), std::move(states));
  }
  if (doc.contains("TaskType") && as_text(doc["TaskType"]) != "Tagging") {
    return failure("Tagging", ErrorCode::kSchemaViolation,
                   "TaskType is '" + as_text(doc["TaskType"]) + "', expected 'Tagging'",
                   std::move(states));
  }
  if (!doc.contains("Tags") || !doc["Tags"].is_array()) {
    return failure("Tagging", ErrorCode::kSchemaViolation, "missing required field 'Tags'",
                   std::move(states));
  }
  const Json& tags = doc["Tags"];
  std::size_t n = expected_items;
  if (n == 0) {
    for (std::size_t i = 0; i < tags.size(); ++i) {
      const Json& t = tags[i];
      if (t.is_object() && t.contains("Index") && t["Index"].is_number_integer()) {
        n = std::max<std::size_t>(n, static_cast<std::size_t>(std::max(0LL, t["Index"].get<long long>())));
      } else {
        n = std::max(n, i + 1);
      }
    }
  }
  TagAssignments out;
  out.tags.assign(n, std::nullopt);
  std::size_t filled = 0;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Json& t = tags[i];
    std::size_t index = i + 1;
    Json value = t;
    if (t.is_object()) {
      if (!t.contains("Index") || !t["Index"].is_number_integer() || !t.contains("Tag")) {
        return failure("Tagging", ErrorCode::kSchemaViolation,
                       fmt::format("Tags[{}] needs integer 'Index' and 'Tag'", i), std::move(states));
      }
      const long long idx = t["Index"].get<long long>();
      if (idx < 1) {
        return failure("Tagging", ErrorCode::kSchemaViolation,
                       fmt::format("Tags[{}] has index {} outside 1..{}", i, idx, n),
                       std::move(states));
      }
      index = static_cast<std::size_t>(idx);
      value = t["Tag"];
    }
    if (index > n) {
      return failure("Tagging", ErrorCode::kSchemaViolation,
                     fmt::format("Tags[{}] has index {} outside 1..{}", i, index, n), std::move(states));
    }
    if (out.tags[index - 1]) {
      return failure("Tagging", ErrorCode::kSchemaViolation,
                     fmt::format("duplicate tag for index {}", index), std::move(states));
    }
    const auto cell = string_list(value);
    const std::string canonical = canonical_tag_cell(cell);
    if (canonical.empty()) continue;
    out.tags[index - 1] = canonical;
    ++filled;
  }
  if (filled == 0) {
    return failure("Tagging", ErrorCode::kSchemaViolation, "no usable tags", std::move(states));
  }
  return ParsedOutput{std::move(out), std::move(states)};
}

}  // namespace

ParsedOutput parse_document(const Json& doc, Task task, std::size_t expected_items,
                            bool require_intermediates) {
  if (!doc.is_object()) {
    return failure(is_tagging(task) ? "Tagging" : "Summary", ErrorCode::kMalformedOutput,
                   "output is not a JSON object");
  }
  if (is_tagging(task)) return parse_tags(doc, expected_items);
  return parse_summary(doc, require_intermediates);
}

ParsedOutput parse_structured_output(std::string_view raw, Task task, std::size_t expected_items,
                                     bool require_intermediates) {
  const auto doc = extract_json_object(raw);
  if (!doc) {
    return failure(is_tagging(task) ? "Tagging" : "Summary", ErrorCode::kMalformedOutput,
                   "no well-formed JSON object found in model output");
  }
  return parse_document(*doc, task, expected_items, require_intermediates);
}

std::string canonical_tag_cell(std::span<const std::string> tags) {
  std::set<std::string> unique;
  for (const auto& t : tags) {
    std::string trimmed = text::trim(t);
    if (!trimmed.empty()) unique.insert(std::move(trimmed));
  }
  return text::join(std::vector<std::string>(unique.begin(), unique.end()), " | ");
}

Json serialize_summary(const SummaryOutput& s) {
  Json j;
  j["TaskType"] = s.task_type;
  j["OutputLanguage"] = s.output_language;
  j["ColumnName"] = s.column_name;
  if (s.domain) j["Domain"] = *s.domain;
  if (s.perspective) {
    j["Perspective"] = Json{{"NumTopics", s.perspective->num_topics},
                            {"TopWords", s.perspective->top_words}};
  }
  Json results = Json::array();
  for (const auto& b : s.results) {
    results.push_back(
        Json{{"Title", b.title}, {"Description", b.description}, {"TopicWords", b.topic_words}});
  }
  j["Results"] = std::move(results);
  return j;
}

Json serialize_error(const ErrorRecord& e) {
  return Json{{"TaskType", e.task_type}, {"Error", e.error}};
}

Json serialize_intermediates(const IntermediateStates& s) {
  Json j;
  j["field_names"] = s.field_names;
  j["domain"] = s.domain ? Json(*s.domain) : Json();
  j["topics"] = s.topics;
  Json clusters = Json::array();
  for (const auto& c : s.clusters) clusters.push_back(Json{{"topic", c.topic}, {"items", c.items}});
  j["clusters"] = std::move(clusters);
  j["tagging_mode"] = s.tagging_mode ? Json(std::string(to_string(*s.tagging_mode))) : Json();
  j["schema"] = s.schema;
  j["extra"] = s.extra;
  return j;
}

IntermediateStates deserialize_intermediates(const Json& j) {
  IntermediateStates s;
  if (!j.is_object()) return s;
  s.field_names = j.value("field_names", std::vector<std::string>{});
  if (j.contains("domain") && j["domain"].is_string()) s.domain = j["domain"].get<std::string>();
  s.topics = j.value("topics", std::vector<std::string>{});
  if (j.contains("clusters")) {
    for (const auto& c : j["clusters"]) {
      s.clusters.push_back({c.value("topic", ""), c.value("items", std::vector<std::size_t>{})});
    }
  }
  if (j.contains("tagging_mode") && j["tagging_mode"].is_string()) {
    s.tagging_mode = parse_tagging_mode(j["tagging_mode"].get<std::string>());
  }
  s.schema = j.value("schema", std::vector<std::string>{});
  if (j.contains("extra")) s.extra = j["extra"];
  return s;
}

// ---------------------------------------------------------------------------
// Constraint validation and repair

bool is_others_title(std::string_view title) {
  const std::string n = text::normalize(title);
  return n == "others" || n == "other" || n == "miscellaneous" || n == "misc" ||
         n == "other topics" || n == "others category";
}

namespace {

std::string primary_language(std::string_view tag) {
  std::string out;
  for (char c : tag) {
    if (c == '_' || c == '-') break;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return text::trim(out);
}

// Topic weight per normalized title, when the intermediates carry item lists.
std::map<std::string, std::size_t> topic_weights(const IntermediateStates* states) {
  std::map<std::string, std::size_t> weights;
  if (!states) return weights;
  for (const auto& c : states->clusters) {
    if (!c.items.empty()) weights[text::normalize(c.topic)] = c.items.size();
  }
  return weights;
}

bool weight_order_applies(const SummaryOutput& out, const std::map<std::string, std::size_t>& w) {
  if (w.empty()) return false;
  std::size_t counted = 0;
  for (const auto& b : out.results) {
    if (is_others_title(b.title)) continue;
    if (!w.count(text::normalize(b.title))) return false;
    ++counted;
  }
  return counted >= 2;
}

bool weight_before(const BulletItem& a, const BulletItem& b,
                   const std::map<std::string, std::size_t>& w) {
  const auto wa = w.at(text::normalize(a.title));
  const auto wb = w.at(text::normalize(b.title));
  if (wa != wb) return wa > wb;
  return text::normalize(a.title) < text::normalize(b.title);
}

void renumber(SummaryOutput& s) {
  for (std::size_t i = 0; i < s.results.size(); ++i) s.results[i].position = i;
}

}  // namespace

std::vector<Violation> validate_constraints(const SummaryOutput& out, const QueryConstraints& c,
                                            const IntermediateStates* intermediates) {
  std::vector<Violation> v;
  const std::size_t n = out.results.size();
  if (c.max_bullets && n > *c.max_bullets) {
    v.push_back({ViolationKind::kCardinality,
                 fmt::format("{} bullet points exceed the maximum of {}", n, *c.max_bullets)});
  }
  if (c.min_bullets && n < *c.min_bullets) {
    v.push_back({ViolationKind::kCardinality,
                 fmt::format("{} bullet points are fewer than the minimum of {}", n, *c.min_bullets)});
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (is_others_title(out.results[i].title)) {
      v.push_back({ViolationKind::kOthersPosition,
                   fmt::format("'{}' category at position {} is not last", out.results[i].title, i)});
      break;
    }
  }
  const auto weights = topic_weights(intermediates);
  if (weight_order_applies(out, weights)) {
    std::vector<BulletItem> ranked;
    for (const auto& b : out.results) {
      if (!is_others_title(b.title)) ranked.push_back(b);
    }
    for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
      if (weight_before(ranked[i + 1], ranked[i], weights)) {
        v.push_back({ViolationKind::kWeightOrder,
                     fmt::format("'{}' is ordered before heavier or alphabetically earlier topic '{}'",
                                 ranked[i].title, ranked[i + 1].title)});
        break;
      }
    }
  }
  if (c.output_language) {
    const std::string want = primary_language(*c.output_language);
    const std::string got = primary_language(out.output_language);
    if (got.empty() || got != want) {
      v.push_back({ViolationKind::kLanguage,
                   fmt::format("output language '{}' does not match requested '{}'",
                               out.output_language, *c.output_language)});
    }
  }
  return v;
}

RefineResult refine_output(const SummaryOutput& out, const std::vector<Violation>& violations,
                           const QueryConstraints& c, const IntermediateStates* intermediates,
                           Provider* llm, const DecodeParams& params) {
  RefineResult result;
  result.output = out;
  if (violations.empty()) return result;
  SummaryOutput& s = result.output;

  const auto weights = topic_weights(intermediates);
  std::vector<BulletItem> regular, others;
  for (const auto& b : s.results) (is_others_title(b.title) ? others : regular).push_back(b);
  if (weight_order_applies(s, weights)) {
    std::stable_sort(regular.begin(), regular.end(), [&](const BulletItem& a, const BulletItem& b) {
      return weight_before(a, b, weights);
    });
  }

  std::vector<BulletItem> merged;
  bool overflow = false;
  if (c.max_bullets && regular.size() + others.size() > *c.max_bullets) {
    const std::size_t limit = std::max<std::size_t>(1, *c.max_bullets);
    const std::size_t keep = std::min(regular.size(), limit - 1);
    merged.assign(regular.begin() + static_cast<std::ptrdiff_t>(keep), regular.end());
    regular.resize(keep);
    overflow = true;
  }
  merged.insert(merged.end(), others.begin(), others.end());
  if (merged.size() > 1 || (overflow && !merged.empty())) {
    BulletItem bucket;
    bucket.title = "Others";
    std::vector<std::string> parts;
    std::set<std::string> seen_words;
    for (const auto& b : merged) {
      parts.push_back(b.description.empty() ? b.title : b.description);
      for (const auto& w : b.topic_words) {
        if (seen_words.insert(w).second) bucket.topic_words.push_back(w);
      }
    }
    bucket.description = text::join(parts, " ");
    others = {std::move(bucket)};
  } else {
    others = std::move(merged);
  }

  s.results = std::move(regular);
  s.results.insert(s.results.end(), others.begin(), others.end());
  renumber(s);
  if (s.perspective) s.perspective->num_topics = std::min(s.perspective->num_topics, s.results.size());
  result.residual = validate_constraints(s, c, intermediates);

  if (!result.residual.empty() && llm != nullptr) {
    result.llm_called = true;
    std::string listing;
    for (const auto& v : result.residual) listing += "- " + v.message + "\n";
    PromptSpec repair;
    repair.task = Task::kRepair;
    repair.input_payload = Json{{"Violations", listing}, {"Document", serialize_summary(s)}};
    repair.rendered_text = render_template(
        assets::get("templates/repair.md"),
        {{"VIOLATIONS", listing}, {"DOCUMENT", dump(serialize_summary(s))}});
    try {
      const auto reply = llm->complete(repair, params, 0);
      const auto parsed = parse_structured_output(reply.text, Task::kSummarize);
      if (const auto* fixed = parsed.summary();
          fixed != nullptr && fixed->results.size() <= s.results.size()) {
        auto fixed_violations = validate_constraints(*fixed, c, intermediates);
        const auto cardinality = [](const std::vector<Violation>& vs) {
          return std::count_if(vs.begin(), vs.end(), [](const Violation& v) {
            return v.kind == ViolationKind::kCardinality;
          });
        };
        if (fixed_violations.size() < result.residual.size() &&
            cardinality(fixed_violations) <= cardinality(result.residual)) {
          s = *fixed;
          renumber(s);
          result.residual = std::move(fixed_violations);
        }
      }
    } catch (const Error&) {
      // best effort: keep the deterministic repair
    }
  }
  return result;
}

}  // namespace castbench
