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

#include "castbench/config.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "castbench/error.hpp"
#include "castbench/persistence.hpp"
#include "castbench/pipeline.hpp"
#include "castbench/text.hpp"

namespace castbench {
namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::kConfig, message); }

void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(fmt::format("{}: expected an object", where));
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <typename T>
T get(const Json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj[key].get<T>();
  } catch (const Json::exception&) {
    fail(fmt::format("{}.{}: wrong type", where, key));
  }
}

std::string required_string(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty()) {
    fail(fmt::format("{}.{}: required non-empty string", where, key));
  }
  return obj[key].get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Task parse_query_task(const std::string& s) {
  if (s == "summarize") return Task::kSummarize;
  if (s == "tag") return Task::kTag;
  fail(fmt::format("unknown query task '{}' (summarize or tag)", s));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (datasets.empty()) fail("config: 'datasets' must list at least one dataset");
  if (queries.empty()) fail("config: 'queries' must list at least one query");
  if (methods.empty()) fail("config: 'methods' must not be empty");
  for (const auto& m : methods) {
    if (!is_known_method(m)) fail(fmt::format("config: unknown method '{}'", m));
  }
  if (n_runs < 2) fail("config: n_runs must be at least 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("config: alpha must lie in [0, 1]");
  if (self_consistency_k < 2) fail("config: self_consistency_k must be at least 2");
  if (!(match.threshold >= 0.0 && match.threshold <= 10.0)) fail("config: match.threshold must lie in [0, 10]");
  if (parallelism < 1) fail("config: parallelism must be at least 1");
  if (decode.temperature < 0.0) fail("config: decode.temperature must be non-negative");
  if (decode.timeout_s <= 0.0) fail("config: decode.timeout_s must be positive");
  std::set<std::string> ids;
  for (const auto& d : datasets) {
    if (!ids.insert(d.id).second) fail(fmt::format("config: duplicate dataset id '{}'", d.id));
  }
  std::set<std::string> provider_ids = {"mock"};
  for (const auto& p : providers) provider_ids.insert(p.id);
  if (!provider_ids.count(provider)) fail(fmt::format("config: provider '{}' is not configured", provider));
  for (const auto& j : judges) {
    if (j != "lexical" && !provider_ids.count(j)) fail(fmt::format("config: judge '{}' is not a provider", j));
  }
  if (judges.empty()) fail("config: 'judges' must not be empty");
  if (clusterer != "lexical" && !provider_ids.count(clusterer)) {
    fail(fmt::format("config: clusterer '{}' is not a provider", clusterer));
  }
  if (mock) mock->config.validate();
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(text, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::string message = e.what();
    if (auto pos = message.find("parse error"); pos != std::string::npos) message = message.substr(pos);
    fail(fmt::format("config syntax error at line {}, column {}: {}", line, column, message));
  }
  check_keys(doc, "config",
             {"output_root", "datasets", "queries", "methods", "n_runs", "alpha", "self_consistency_k", "decode",
              "provider", "providers", "mock", "judges", "clusterer", "match", "fewshot_examples", "parallelism",
              "llm_refine"});
  ExperimentConfig c;
  c.output_root = resolve(base_dir, get<std::string>(doc, "output_root", "config", "castbench_runs"));
  for (const auto& d : doc.value("datasets", Json::array())) {
    const std::string where = "datasets[" + std::to_string(c.datasets.size()) + "]";
    check_keys(d, where, {"id", "path", "column_name", "gold_column", "id_column", "language"});
    DatasetConfig ds;
    ds.id = required_string(d, "id", where);
    ds.path = resolve(base_dir, required_string(d, "path", where));
    ds.column_name = required_string(d, "column_name", where);
    if (d.contains("gold_column")) ds.gold_column = required_string(d, "gold_column", where);
    if (d.contains("id_column")) ds.id_column = required_string(d, "id_column", where);
    ds.language = get<std::string>(d, "language", where, "en_US");
    c.datasets.push_back(std::move(ds));
  }
  for (const auto& q : doc.value("queries", Json::array())) {
    const std::string where = "queries[" + std::to_string(c.queries.size()) + "]";
    check_keys(q, where, {"text", "language", "task", "mode"});
    QueryConfig qc;
    qc.text = required_string(q, "text", where);
    if (q.contains("language")) qc.language = required_string(q, "language", where);
    qc.task = parse_query_task(get<std::string>(q, "task", where, "summarize"));
    if (q.contains("mode")) {
      const std::string mode = required_string(q, "mode", where);
      if (mode != "auto") qc.mode = parse_tagging_mode(mode);
      if (qc.task != Task::kTag) fail(where + ".mode: only valid for task 'tag'");
      if (qc.mode) qc.task = *qc.mode == TaggingMode::kJoint ? Task::kTagJoint : Task::kTagIndependent;
    }
    c.queries.push_back(std::move(qc));
  }
  c.methods = get<std::vector<std::string>>(doc, "methods", "config", c.methods);
  c.n_runs = get<std::size_t>(doc, "n_runs", "config", c.n_runs);
  c.alpha = get<double>(doc, "alpha", "config", c.alpha);
  c.self_consistency_k = get<std::size_t>(doc, "self_consistency_k", "config", c.self_consistency_k);
  if (doc.contains("decode")) {
    const Json& d = doc["decode"];
    check_keys(d, "decode", {"temperature", "seed", "max_tokens", "timeout_s"});
    c.decode.temperature = get<double>(d, "temperature", "decode", c.decode.temperature);
    c.decode.seed = get<std::int64_t>(d, "seed", "decode", c.decode.seed);
    if (d.contains("max_tokens")) c.decode.max_tokens = get<std::size_t>(d, "max_tokens", "decode", 0);
    c.decode.timeout_s = get<double>(d, "timeout_s", "decode", c.decode.timeout_s);
  }
  c.provider = get<std::string>(doc, "provider", "config", c.provider);
  for (const auto& p : doc.value("providers", Json::array())) {
    const std::string where = "providers[" + std::to_string(c.providers.size()) + "]";
    check_keys(p, where, {"id", "base_url", "model", "api_key_env", "auth_header", "auth_scheme", "requests_per_minute"});
    ProviderConfig pc;
    pc.id = required_string(p, "id", where);
    if (pc.id == "mock") fail(where + ".id: 'mock' is reserved");
    pc.base_url = required_string(p, "base_url", where);
    pc.model = required_string(p, "model", where);
    pc.api_key_env = get<std::string>(p, "api_key_env", where, "");
    pc.auth_header = get<std::string>(p, "auth_header", where, pc.auth_header);
    pc.auth_scheme = get<std::string>(p, "auth_scheme", where, pc.auth_scheme);
    pc.requests_per_minute = get<double>(p, "requests_per_minute", where, 0.0);
    c.providers.push_back(std::move(pc));
  }
  if (doc.contains("mock")) {
    const Json& m = doc["mock"];
    check_keys(m, "mock", {"seed", "p_reorder", "p_paraphrase", "p_topic_jitter", "p_malformed", "scenario",
                           "scenario_by_method", "answer_bank", "synonyms"});
    MockSection ms;
    ms.config.seed = get<std::uint64_t>(m, "seed", "mock", ms.config.seed);
    ms.config.p_reorder = get<double>(m, "p_reorder", "mock", 0.0);
    ms.config.p_paraphrase = get<double>(m, "p_paraphrase", "mock", 0.0);
    ms.config.p_topic_jitter = get<double>(m, "p_topic_jitter", "mock", 0.0);
    ms.config.p_malformed = get<double>(m, "p_malformed", "mock", 0.0);
    ms.config.scenario = parse_mock_scenario(get<std::string>(m, "scenario", "mock", "cast_like"));
    const Json by_method = m.value("scenario_by_method", Json::object());
    for (const auto& [method, scenario] : by_method.items()) {
      if (!scenario.is_string()) fail("mock.scenario_by_method: values must be strings");
      ms.scenario_by_method[method] = parse_mock_scenario(scenario.get<std::string>());
    }
    if (m.contains("answer_bank")) ms.answer_bank = resolve(base_dir, required_string(m, "answer_bank", "mock"));
    if (m.contains("synonyms")) ms.synonyms = resolve(base_dir, required_string(m, "synonyms", "mock"));
    c.mock = std::move(ms);
  }
  c.judges = get<std::vector<std::string>>(doc, "judges", "config", c.judges);
  c.clusterer = get<std::string>(doc, "clusterer", "config", c.clusterer);
  if (doc.contains("match")) {
    const Json& m = doc["match"];
    check_keys(m, "match", {"threshold", "strategy"});
    c.match.threshold = get<double>(m, "threshold", "match", c.match.threshold);
    const std::string strategy = get<std::string>(m, "strategy", "match", "greedy");
    if (strategy != "greedy" && strategy != "optimal") fail("match.strategy: greedy or optimal");
    c.match.strategy = strategy == "optimal" ? MatchStrategy::kOptimal : MatchStrategy::kGreedy;
  }
  if (doc.contains("fewshot_examples")) {
    c.fewshot_examples = resolve(base_dir, required_string(doc, "fewshot_examples", "config"));
  }
  c.parallelism = get<std::size_t>(doc, "parallelism", "config", c.parallelism);
  c.llm_refine = get<bool>(doc, "llm_refine", "config", c.llm_refine);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail(e.what());
  }
  return parse_config(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field.push_back(c);
      any = true;
    }
  }
  if (quoted) fail("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

Dataset load_dataset(const DatasetConfig& cfg) {
  if (!std::filesystem::is_regular_file(cfg.path)) {
    fail(fmt::format("dataset '{}': file {} not found", cfg.id, cfg.path.string()));
  }
  Dataset ds;
  ds.id = cfg.id;
  ds.column_name = cfg.column_name;
  ds.language = cfg.language;
  const std::string ext = cfg.path.extension().string();
  auto add = [&](std::size_t row, std::string value, std::optional<std::string> id, std::optional<std::string> gold) {
    std::string item = text::trim(value);
    if (item.empty()) fail(fmt::format("dataset '{}': row {} has an empty '{}' value", cfg.id, row, cfg.column_name));
    ds.items.push_back(std::move(item));
    ds.item_ids.push_back(id.value_or(std::to_string(row - 1)));
    if (gold) gold = text::trim(*gold);
    ds.gold.push_back(gold && !gold->empty() ? gold : std::nullopt);
  };

  if (ext == ".csv") {
    const auto rows = parse_csv(read_text_file(cfg.path));
    if (rows.empty()) fail(fmt::format("dataset '{}': empty file", cfg.id));
    const auto& header = rows.front();
    auto column = [&](const std::string& name) -> std::size_t {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) fail(fmt::format("dataset '{}': column '{}' not found", cfg.id, name));
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t text_col = column(cfg.column_name);
    const std::optional<std::size_t> gold_col = cfg.gold_column ? std::optional(column(*cfg.gold_column)) : std::nullopt;
    const std::optional<std::size_t> id_col = cfg.id_column ? std::optional(column(*cfg.id_column)) : std::nullopt;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      auto cell = [&](std::size_t c) { return c < row.size() ? row[c] : std::string(); };
      add(r, cell(text_col), id_col ? std::optional(cell(*id_col)) : std::nullopt,
          gold_col ? std::optional(cell(*gold_col)) : std::nullopt);
    }
  } else if (ext == ".jsonl" || ext == ".ndjson") {
    std::vector<Json> records;
    try {
      records = read_jsonl(cfg.path);
    } catch (const Error& e) {
      fail(fmt::format("dataset '{}': {}", cfg.id, e.what()));
    }
    auto field = [&](const Json& rec, const std::string& name, std::size_t row) -> std::string {
      if (!rec.is_object() || !rec.contains(name)) {
        fail(fmt::format("dataset '{}': record {} lacks field '{}'", cfg.id, row, name));
      }
      return rec[name].is_string() ? rec[name].get<std::string>() : rec[name].dump();
    };
    for (std::size_t r = 0; r < records.size(); ++r) {
      add(r + 1, field(records[r], cfg.column_name, r + 1),
          cfg.id_column ? std::optional(field(records[r], *cfg.id_column, r + 1)) : std::nullopt,
          cfg.gold_column ? std::optional(field(records[r], *cfg.gold_column, r + 1)) : std::nullopt);
    }
  } else {
    fail(fmt::format("dataset '{}': unsupported extension '{}' (use .csv or .jsonl)", cfg.id, ext));
  }
  if (ds.items.empty()) fail(fmt::format("dataset '{}': no rows", cfg.id));
  return ds;
}

}  // namespace castbench
