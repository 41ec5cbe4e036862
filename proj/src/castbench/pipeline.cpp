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

#include "castbench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <map>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "castbench/error.hpp"
#include "castbench/persistence.hpp"
#include "castbench/text.hpp"

namespace castbench {
namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t parallelism, Fn&& fn) {
  const std::size_t workers = std::min(n, std::max<std::size_t>(1, parallelism));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

ErrorCode error_code_from_name(std::string_view name) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kIo); ++c) {
    if (error_code_name(static_cast<ErrorCode>(c)) == name) return static_cast<ErrorCode>(c);
  }
  return ErrorCode::kMalformedOutput;
}

const char* task_type(Task task) { return is_tagging(task) ? "Tagging" : "Summary"; }

std::optional<Variant> variant_of(std::string_view method) {
  if (method == kSelfConsistency) return std::nullopt;
  return parse_variant(method);
}

Json decode_json(const DecodeParams& d) {
  return Json{{"temperature", d.temperature},
              {"seed", d.seed},
              {"max_tokens", d.max_tokens ? Json(*d.max_tokens) : Json(nullptr)},
              {"timeout_s", d.timeout_s}};
}

DecodeParams decode_from(const Json& j) {
  DecodeParams d;
  if (!j.is_object()) return d;
  d.temperature = j.value("temperature", d.temperature);
  d.seed = j.value("seed", d.seed);
  if (j.contains("max_tokens") && j["max_tokens"].is_number_unsigned()) {
    d.max_tokens = j["max_tokens"].get<std::size_t>();
  }
  d.timeout_s = j.value("timeout_s", d.timeout_s);
  return d;
}

Json stat_json(const stats::AggregateStat& s) { return Json{{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

stats::AggregateStat stat_from(const Json& j) {
  return {j.value("mean", 0.0), j.value("std", 0.0), j.value("n", std::size_t{0})};
}

Json tags_json(const TagAssignments& t) {
  Json tags = Json::array();
  for (const auto& cell : t.tags) tags.push_back(cell ? Json(*cell) : Json(nullptr));
  return Json{{"TaskType", "Tagging"}, {"Tags", std::move(tags)}};
}

RunRecord base_record(const ExperimentSpec& spec, std::size_t run_index) {
  RunRecord r;
  r.experiment_id = spec.meta.experiment_id;
  r.dataset_id = spec.meta.dataset_id;
  r.query = spec.meta.query;
  r.method = spec.meta.method;
  r.task = spec.meta.task;
  r.run_index = run_index;
  r.decode = spec.decode;
  return r;
}

// One completion, parsed and checked. Refinement applies to the
// algorithmic-prompting variants only.
RunRecord execute(const ExperimentSpec& spec, const PromptSpec& prompt, Provider& provider,
                  std::size_t run_index, std::size_t sample_index) {
  RunRecord rec = base_record(spec, run_index);
  rec.provider = provider.id();
  try {
    const CompletionResult c = provider.complete(prompt, spec.decode, sample_index);
    rec.raw = c.text;
    rec.latency_s = c.latency_s;
    rec.provider = c.provider;
    rec.attempt_count = c.attempt_count;
  } catch (const Error& e) {
    rec.parsed = ParsedOutput{ErrorRecord{task_type(spec.meta.task), e.what(), e.code()}, {}};
    return rec;
  }
  const bool guard = !is_tagging(spec.meta.task) && uses_thinking_before_speaking(prompt.variant);
  rec.parsed = parse_structured_output(rec.raw, spec.meta.task, spec.items.size(), guard);
  if (const SummaryOutput* s = rec.parsed.summary()) {
    const QueryConstraints constraints = decompose_query(spec.meta.query);
    auto violations = validate_constraints(*s, constraints, &rec.parsed.intermediates);
    if (!violations.empty() && uses_algorithmic_prompting(prompt.variant)) {
      RefineResult refined = refine_output(*s, violations, constraints, &rec.parsed.intermediates,
                                           spec.llm_refine ? &provider : nullptr, spec.decode);
      rec.parsed.value = std::move(refined.output);
      violations = std::move(refined.residual);
    }
    rec.residual_violations = std::move(violations);
  }
  return rec;
}

}  // namespace

bool is_known_method(std::string_view method) {
  if (method == kSelfConsistency) return true;
  for (Variant v : {Variant::kCast, Variant::kApOnly, Variant::kTbsOnly, Variant::kZeroshotCot,
                    Variant::kFewshotCot}) {
    if (to_string(v) == method) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Records

Json to_json(const ExperimentMeta& m) {
  Json gold = Json::array();
  for (const auto& g : m.gold) gold.push_back(g ? Json(*g) : Json(nullptr));
  return Json{{"experiment_id", m.experiment_id},
              {"dataset_id", m.dataset_id},
              {"query", m.query},
              {"method", m.method},
              {"scenario", m.scenario ? Json(*m.scenario) : Json(nullptr)},
              {"task", std::string(to_string(m.task))},
              {"mode", m.mode ? Json(std::string(to_string(*m.mode))) : Json(nullptr)},
              {"column_name", m.column_name},
              {"language", m.language},
              {"provider", m.provider},
              {"n_runs", m.n_runs},
              {"alpha", m.alpha},
              {"match", Json{{"threshold", m.match.threshold},
                             {"strategy", m.match.strategy == MatchStrategy::kOptimal ? "optimal" : "greedy"}}},
              {"judges", m.judges},
              {"item_ids", m.item_ids},
              {"gold", std::move(gold)}};
}

ExperimentMeta experiment_meta_from_json(const Json& j) {
  try {
    ExperimentMeta m;
    m.experiment_id = j.at("experiment_id").get<std::string>();
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.query = j.at("query").get<std::string>();
    m.method = j.at("method").get<std::string>();
    if (j.contains("scenario") && j["scenario"].is_string()) m.scenario = j["scenario"].get<std::string>();
    m.task = parse_task(j.at("task").get<std::string>());
    if (j.contains("mode") && j["mode"].is_string()) m.mode = parse_tagging_mode(j["mode"].get<std::string>());
    m.column_name = j.value("column_name", "");
    m.language = j.value("language", "en_US");
    m.provider = j.value("provider", "");
    m.n_runs = j.at("n_runs").get<std::size_t>();
    m.alpha = j.value("alpha", kDefaultAlpha);
    if (j.contains("match")) {
      m.match.threshold = j["match"].value("threshold", 5.0);
      m.match.strategy =
          j["match"].value("strategy", "greedy") == "optimal" ? MatchStrategy::kOptimal : MatchStrategy::kGreedy;
    }
    m.judges = j.value("judges", std::vector<std::string>{"lexical"});
    m.item_ids = j.value("item_ids", std::vector<std::string>{});
    if (j.contains("gold")) {
      for (const auto& g : j["gold"]) {
        m.gold.push_back(g.is_string() ? std::optional<std::string>(g.get<std::string>()) : std::nullopt);
      }
    }
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("experiment.json: ") + e.what());
  }
}

Json to_json(const RunRecord& r) {
  Json parsed;
  if (const auto* s = r.parsed.summary()) {
    parsed = serialize_summary(*s);
  } else if (const auto* t = r.parsed.tags()) {
    parsed = tags_json(*t);
  } else {
    parsed = serialize_error(*r.parsed.error());
  }
  Json violations = Json::array();
  for (const auto& v : r.residual_violations) {
    violations.push_back(Json{{"kind", std::string(to_string(v.kind))}, {"message", v.message}});
  }
  Json j;
  j["experiment_id"] = r.experiment_id;
  j["dataset_id"] = r.dataset_id;
  j["query"] = r.query;
  j["method"] = r.method;
  j["task"] = std::string(to_string(r.task));
  j["run_index"] = r.run_index;
  j["decode"] = decode_json(r.decode);
  j["provider"] = r.provider;
  j["attempt_count"] = r.attempt_count;
  j["latency_s"] = r.latency_s;
  j["status"] = r.ok() ? "ok" : "error";
  j["error_kind"] = r.ok() ? Json(nullptr) : Json(std::string(error_code_name(r.parsed.error()->kind)));
  j["raw"] = r.raw;
  j["parsed"] = std::move(parsed);
  j["intermediates"] = serialize_intermediates(r.parsed.intermediates);
  j["residual_violations"] = std::move(violations);
  j["samples"] = r.samples;
  return j;
}

RunRecord run_record_from_json(const Json& j) {
  try {
    RunRecord r;
    r.experiment_id = j.at("experiment_id").get<std::string>();
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.query = j.at("query").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.run_index = j.at("run_index").get<std::size_t>();
    r.decode = decode_from(j.value("decode", Json::object()));
    r.provider = j.value("provider", "");
    r.attempt_count = j.value("attempt_count", std::size_t{0});
    r.latency_s = j.value("latency_s", 0.0);
    r.raw = j.value("raw", "");
    const Json& parsed = j.at("parsed");
    const IntermediateStates states = deserialize_intermediates(j.value("intermediates", Json::object()));
    if (j.value("status", "error") != "ok") {
      r.parsed = ParsedOutput{ErrorRecord{parsed.value("TaskType", task_type(r.task)), parsed.value("Error", ""),
                                          error_code_from_name(j.value("error_kind", ""))},
                              states};
    } else if (is_tagging(r.task)) {
      TagAssignments t;
      for (const auto& cell : parsed.at("Tags")) {
        t.tags.push_back(cell.is_string() ? std::optional<std::string>(cell.get<std::string>()) : std::nullopt);
      }
      r.parsed = ParsedOutput{std::move(t), states};
    } else {
      r.parsed = parse_document(parsed, Task::kSummarize);
      if (!r.parsed.ok()) {
        throw Error(ErrorCode::kIo, "persisted summary no longer parses: " + r.parsed.error()->error);
      }
      r.parsed.intermediates = states;
    }
    for (const auto& v : j.value("residual_violations", Json::array())) {
      const std::string kind = v.value("kind", "");
      ViolationKind k = ViolationKind::kCardinality;
      for (auto candidate : {ViolationKind::kCardinality, ViolationKind::kOthersPosition,
                             ViolationKind::kWeightOrder, ViolationKind::kLanguage}) {
        if (to_string(candidate) == kind) k = candidate;
      }
      r.residual_violations.push_back({k, v.value("message", "")});
    }
    r.samples = j.value("samples", std::vector<std::size_t>{});
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("run record: ") + e.what());
  }
}

std::string make_experiment_id(std::string_view dataset_id, std::string_view query,
                               std::string_view method) {
  auto slug = [](std::string_view s, std::size_t max_len) {
    std::string out;
    for (unsigned char c : s) {
      if (std::isalnum(c)) {
        out.push_back(static_cast<char>(std::tolower(c)));
      } else if (!out.empty() && out.back() != '-') {
        out.push_back('-');
      }
      if (out.size() >= max_len) break;
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? std::string("x") : out;
  };
  return fmt::format("{}__{}-{}__{}", slug(dataset_id, 48), slug(query, 32),
                     text::sha256_hex(query).substr(0, 8), slug(method, 48));
}

// ---------------------------------------------------------------------------
// Running

PromptSpec build_prompt(const ExperimentSpec& spec) {
  const Variant variant = variant_of(spec.meta.method).value_or(Variant::kZeroshotCot);
  const CorpusInfo info{spec.meta.column_name, spec.meta.language, spec.meta.dataset_id};
  if (is_tagging(spec.meta.task)) {
    return build_tagging_prompt(spec.items, spec.meta.query, spec.meta.mode, variant, info, spec.few_shot);
  }
  QueryConstraints c = decompose_query(spec.meta.query);
  return build_summarization_prompt(spec.items, c, variant, info, spec.few_shot);
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, Provider& provider, JsonlWriter* writer) {
  require(spec.meta.n_runs >= 2, "run_experiment: n_runs must be at least 2");
  require(!spec.items.empty(), "run_experiment: dataset has no items");
  require(is_known_method(spec.meta.method), "run_experiment: unknown method");
  const bool sc = spec.meta.method == kSelfConsistency;
  const PromptSpec prompt = build_prompt(spec);
  std::vector<RunRecord> records(spec.meta.n_runs);
  parallel_for(spec.meta.n_runs, spec.parallelism, [&](std::size_t i) {
    records[i] = sc ? self_consistency(spec, provider, i) : execute(spec, prompt, provider, i, i);
  });
  if (writer != nullptr) {
    for (const auto& r : records) writer->write(to_json(r));
    writer->flush();
  }
  return records;
}

RunRecord self_consistency(const ExperimentSpec& spec, Provider& provider, std::size_t run_index,
                           const JudgeSet& judges) {
  const std::size_t k = spec.self_consistency_k;
  require(k >= 2, "self_consistency: k must be at least 2");
  ExperimentSpec sample_spec = spec;
  sample_spec.meta.method = std::string(to_string(Variant::kZeroshotCot));
  const PromptSpec prompt = build_prompt(sample_spec);

  std::vector<RunRecord> samples;
  RunRecord out = base_record(spec, run_index);
  out.provider = provider.id();
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t sample_index = run_index * k + j;
    samples.push_back(execute(sample_spec, prompt, provider, run_index, sample_index));
    out.samples.push_back(sample_index);
    out.latency_s += samples.back().latency_s;
    out.attempt_count += samples.back().attempt_count;
  }
  std::vector<std::size_t> valid;
  for (std::size_t j = 0; j < k; ++j) {
    if (samples[j].ok()) valid.push_back(j);
  }
  if (valid.empty()) {
    const ErrorRecord& last = *samples.back().parsed.error();
    out.raw = samples.back().raw;
    out.parsed = ParsedOutput{
        ErrorRecord{last.task_type, fmt::format("all {} samples failed; last: {}", k, last.error), last.kind}, {}};
    return out;
  }

  if (!is_tagging(spec.meta.task)) {
    std::size_t best = valid.front();
    double best_score = -1.0;
    for (std::size_t a : valid) {
      double total = 0.0;
      for (std::size_t b : valid) {
        if (a == b) continue;
        total += cast_s(*samples[a].parsed.summary(), *samples[b].parsed.summary(), spec.meta.alpha, judges,
                        spec.meta.match)
                     .stability_score;
      }
      if (total > best_score) {
        best_score = total;
        best = a;
      }
    }
    out.raw = samples[best].raw;
    out.parsed = samples[best].parsed;
    out.residual_violations = samples[best].residual_violations;
    return out;
  }

  TagAssignments voted;
  voted.tags.assign(spec.items.size(), std::nullopt);
  for (std::size_t item = 0; item < spec.items.size(); ++item) {
    std::vector<std::pair<std::string, std::size_t>> counts;  // first-seen order
    for (std::size_t j : valid) {
      const auto& cells = samples[j].parsed.tags()->tags;
      if (item >= cells.size() || !cells[item]) continue;
      auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == *cells[item]; });
      if (it == counts.end()) {
        counts.emplace_back(*cells[item], 1);
      } else {
        ++it->second;
      }
    }
    std::size_t best = 0;
    for (const auto& [tag, count] : counts) {
      if (count > best) {
        best = count;
        voted.tags[item] = tag;
      }
    }
  }
  out.parsed = ParsedOutput{voted, samples[valid.front()].parsed.intermediates};
  out.raw = to_line(tags_json(voted));
  return out;
}

// ---------------------------------------------------------------------------
// Scoring

PairScoring pair_and_score(const std::vector<RunRecord>& records, double alpha, const JudgeSet& judges,
                           const MatchOptions& options) {
  const auto successful = std::count_if(records.begin(), records.end(), [](const RunRecord& r) { return r.ok(); });
  if (successful < 2) {
    throw Error(ErrorCode::kInsufficientRuns,
                fmt::format("{} of {} runs parsed; at least 2 are needed", successful, records.size()));
  }
  std::vector<std::pair<std::size_t, std::size_t>> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) index.emplace_back(i, j);
  }
  PairScoring out;
  out.pairs.resize(index.size());
  MatchOptions inner = options;
  inner.parallelism = 1;
  parallel_for(index.size(), options.parallelism, [&](std::size_t p) {
    const auto [i, j] = index[p];
    const RunRecord& a = records[i];
    const RunRecord& b = records[j];
    PairComparison pc;
    if (a.ok() && b.ok()) {
      pc = cast_s(*a.parsed.summary(), *b.parsed.summary(), alpha, judges, inner);
    } else {
      pc.group1_count = a.ok() ? a.parsed.summary()->results.size() : 0;
      pc.group2_count = b.ok() ? b.parsed.summary()->results.size() : 0;
      pc.size_difference = std::fabs(static_cast<double>(pc.group1_count) - static_cast<double>(pc.group2_count));
      pc.analysis_details = fmt::format("run {} has no parsed summary; pair scored 0",
                                        (a.ok() ? b : a).run_index + 1);
    }
    pc.dataset = a.dataset_id;
    pc.query = a.query;
    pc.round_pair = round_pair_label(a.run_index, b.run_index);
    out.pairs[p] = std::move(pc);
  });
  out.stability = aggregate_pairs(out.pairs);
  return out;
}

std::string path_signature(const RunRecord& r) {
  if (!r.ok()) return std::string(kErrorSignature);
  const IntermediateStates& s = r.parsed.intermediates;
  auto canonical = [](const std::vector<std::string>& values, bool sorted) {
    std::vector<std::string> out;
    for (const auto& v : values) out.push_back(text::normalize(v));
    if (sorted) std::sort(out.begin(), out.end());
    return out;
  };
  const Json sig = Json::array({canonical(s.field_names, false), s.domain ? text::normalize(*s.domain) : "",
                                canonical(s.topics, true), canonical(s.schema, true)});
  return to_line(sig);
}

double path_entropy(const std::vector<RunRecord>& records) {
  require(!records.empty(), "path_entropy: no records");
  stats::EmpiricalDistribution d;
  for (const auto& r : records) d.add(path_signature(r));
  return stats::shannon_entropy(d);
}

TagRunSet tag_run_set(const ExperimentMeta& meta, const std::vector<RunRecord>& records) {
  TagRunSet set;
  set.n_runs = records.size();
  set.mode = meta.mode.value_or(TaggingMode::kIndependent);
  std::size_t n_items = meta.item_ids.size();
  for (const auto& r : records) {
    if (const auto* t = r.parsed.tags()) n_items = std::max(n_items, t->tags.size());
  }
  for (std::size_t i = 0; i < n_items; ++i) {
    TagItem item;
    item.item_id = i < meta.item_ids.size() ? meta.item_ids[i] : std::to_string(i);
    if (i < meta.gold.size()) item.gold = meta.gold[i];
    for (const auto& r : records) {
      const auto* t = r.parsed.tags();
      item.tags.push_back(t != nullptr && i < t->tags.size() && t->tags[i] ? *t->tags[i]
                                                                           : std::string(kMissingTag));
    }
    set.items.push_back(std::move(item));
  }
  return set;
}

std::size_t output_word_count(const RunRecord& r) {
  if (const auto* s = r.parsed.summary()) {
    std::size_t words = 0;
    for (const auto& b : s->results) words += text::word_count(b.title) + text::word_count(b.description);
    return words;
  }
  if (const auto* t = r.parsed.tags()) {
    std::size_t words = 0;
    for (const auto& cell : t->tags) words += cell ? text::word_count(*cell) : 0;
    return words;
  }
  return text::word_count(r.raw);
}

ScoredExperiment score_experiment(const ExperimentMeta& meta, const std::vector<RunRecord>& records,
                                  const JudgeSet& judges, const Clusterer& clusterer) {
  ScoredExperiment out;
  ExperimentReport& rep = out.report;
  rep.experiment_id = meta.experiment_id;
  rep.dataset_id = meta.dataset_id;
  rep.query = meta.query;
  rep.method = meta.method;
  rep.scenario = meta.scenario;
  rep.task = meta.task;
  rep.alpha = meta.alpha;
  rep.n_runs = records.size();
  require(!records.empty(), "score_experiment: no records");

  std::vector<double> latencies;
  for (const auto& r : records) {
    if (r.ok()) ++rep.successful_runs;
    latencies.push_back(r.latency_s);
    rep.word_counts.push_back(output_word_count(r));
  }
  rep.timing = stats::mean_std(latencies);
  rep.path_entropy_bits = path_entropy(records);
  if (rep.successful_runs < 2) {
    rep.degenerate = true;
    rep.degenerate_reason =
        fmt::format("{}: {} of {} runs parsed", error_code_name(ErrorCode::kInsufficientRuns),
                    rep.successful_runs, rep.n_runs);
    return out;
  }

  if (!is_tagging(meta.task)) {
    PairScoring scoring = pair_and_score(records, meta.alpha, judges, meta.match);
    rep.stability = scoring.stability;
    rep.pair_count = scoring.pairs.size();
    out.pairs = std::move(scoring.pairs);
    return out;
  }

  const TagRunSet set = tag_run_set(meta, records);
  TaggingStability t = cast_t(set, clusterer);
  std::vector<double> item_scores;
  for (const auto& i : t.per_item) item_scores.push_back(i.score);
  rep.stability = stats::mean_std(item_scores);
  rep.pair_count = stats::pair_count(set.n_runs);
  rep.tagging = std::move(t);
  const bool has_gold = !set.items.empty() && std::all_of(set.items.begin(), set.items.end(),
                                                          [](const TagItem& i) { return i.gold.has_value(); });
  if (has_gold && set.mode == TaggingMode::kIndependent) rep.accuracy = accuracy(set);
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

TaggingStability tagging_from(const Json& j) {
  TaggingStability t;
  for (const auto& i : j.value("per_item", Json::array())) {
    t.per_item.push_back({i.value("item_id", ""), i.value("score", 0.0)});
  }
  t.dataset_score = j.value("dataset_score", 0.0);
  t.match_ratio = j.value("match_ratio", 0.0);
  t.mean_entropy_bits = j.value("mean_entropy_bits", 0.0);
  t.provenance = j.value("provenance", std::vector<std::string>{});
  return t;
}

std::string method_label(const ExperimentReport& r) {
  return r.scenario ? fmt::format("{} ({})", r.method, *r.scenario) : r.method;
}

void sort_reports(std::vector<ExperimentReport>& reports) {
  std::sort(reports.begin(), reports.end(), [](const ExperimentReport& a, const ExperimentReport& b) {
    return std::tie(a.dataset_id, a.query, a.method, a.experiment_id) <
           std::tie(b.dataset_id, b.query, b.method, b.experiment_id);
  });
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += (c == '\n' ? ' ' : c);
  }
  return out;
}

std::string fixed(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

std::string format_mean_std(const stats::AggregateStat& s) { return fmt::format("{:.2f} ± {:.2f}", s.mean, s.std); }

Json to_json(const ExperimentReport& r) {
  return Json{{"experiment_id", r.experiment_id},
              {"dataset_id", r.dataset_id},
              {"query", r.query},
              {"method", r.method},
              {"scenario", r.scenario ? Json(*r.scenario) : Json(nullptr)},
              {"task", std::string(to_string(r.task))},
              {"n_runs", r.n_runs},
              {"successful_runs", r.successful_runs},
              {"degenerate", r.degenerate},
              {"degenerate_reason", r.degenerate_reason},
              {"alpha", r.alpha},
              {"stability", r.stability ? stat_json(*r.stability) : Json(nullptr)},
              {"timing", stat_json(r.timing)},
              {"pair_count", r.pair_count},
              {"tagging", r.tagging ? to_json(*r.tagging) : Json(nullptr)},
              {"accuracy", r.accuracy ? stat_json(*r.accuracy) : Json(nullptr)},
              {"path_entropy_bits", r.path_entropy_bits},
              {"word_counts", r.word_counts}};
}

ExperimentReport experiment_report_from_json(const Json& j) {
  try {
    ExperimentReport r;
    r.experiment_id = j.at("experiment_id").get<std::string>();
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.query = j.at("query").get<std::string>();
    r.method = j.at("method").get<std::string>();
    if (j.contains("scenario") && j["scenario"].is_string()) r.scenario = j["scenario"].get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.n_runs = j.at("n_runs").get<std::size_t>();
    r.successful_runs = j.value("successful_runs", std::size_t{0});
    r.degenerate = j.value("degenerate", false);
    r.degenerate_reason = j.value("degenerate_reason", "");
    r.alpha = j.value("alpha", kDefaultAlpha);
    if (j.contains("stability") && j["stability"].is_object()) r.stability = stat_from(j["stability"]);
    r.timing = stat_from(j.at("timing"));
    r.pair_count = j.value("pair_count", std::size_t{0});
    if (j.contains("tagging") && j["tagging"].is_object()) r.tagging = tagging_from(j["tagging"]);
    if (j.contains("accuracy") && j["accuracy"].is_object()) r.accuracy = stat_from(j["accuracy"]);
    r.path_entropy_bits = j.value("path_entropy_bits", 0.0);
    r.word_counts = j.value("word_counts", std::vector<std::size_t>{});
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("report.json: ") + e.what());
  }
}

std::string render_report(std::vector<ExperimentReport> reports, ReportFormat format) {
  sort_reports(reports);
  std::map<std::string, std::vector<double>> entropy_by_method;
  for (const auto& r : reports) entropy_by_method[method_label(r)].push_back(r.path_entropy_bits);

  std::string out;
  if (format == ReportFormat::kCsv) {
    out = "dataset,query,method,task,runs,successful_runs,stability_mean,stability_std,time_mean,time_std,"
          "match_ratio,accuracy_mean,accuracy_std,path_entropy_bits,degenerate\n";
    for (const auto& r : reports) {
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.dataset_id),
                         csv_field(r.query), csv_field(method_label(r)), to_string(r.task), r.n_runs,
                         r.successful_runs, r.stability ? fixed(r.stability->mean) : "",
                         r.stability ? fixed(r.stability->std) : "", fixed(r.timing.mean), fixed(r.timing.std),
                         r.tagging ? fixed(r.tagging->match_ratio) : "", r.accuracy ? fixed(r.accuracy->mean) : "",
                         r.accuracy ? fixed(r.accuracy->std) : "", fixed(r.path_entropy_bits),
                         r.degenerate ? "true" : "false");
    }
    return out;
  }

  out = "| Dataset | Query | Method | Task | Runs | Stability | Time (s) | Match ratio | Accuracy (%) | "
        "Path entropy (bits) |\n";
  out += "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    const std::string stability = r.stability ? format_mean_std(*r.stability) : "degenerate";
    out += fmt::format("| {} | {} | {} | {} | {}/{} | {} | {} | {} | {} | {} |\n", md_field(r.dataset_id),
                       md_field(r.query), md_field(method_label(r)), to_string(r.task), r.successful_runs,
                       r.n_runs, stability, format_mean_std(r.timing),
                       r.tagging ? fixed(r.tagging->match_ratio) : "-",
                       r.accuracy ? format_mean_std(*r.accuracy) : "-", fixed(r.path_entropy_bits));
  }
  out += "\n| Method | Experiments | Path entropy sum (bits) | Path entropy mean (bits) |\n";
  out += "|---|---|---|---|\n";
  for (const auto& [method, values] : entropy_by_method) {
    double sum = 0.0;
    for (double v : values) sum += v;
    out += fmt::format("| {} | {} | {} | {} |\n", md_field(method), values.size(), fixed(sum),
                       fixed(sum / static_cast<double>(values.size())));
  }
  return out;
}

std::string render_word_counts(std::vector<ExperimentReport> reports) {
  sort_reports(reports);
  std::string out = "experiment_id,dataset,query,method,run_index,word_count\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.word_counts.size(); ++i) {
      out += fmt::format("{},{},{},{},{},{}\n", csv_field(r.experiment_id), csv_field(r.dataset_id),
                         csv_field(r.query), csv_field(method_label(r)), i, r.word_counts[i]);
    }
  }
  return out;
}

void write_scored(const ExperimentFiles& files, const ScoredExperiment& scored, const JudgeCache& cache) {
  {
    JsonlWriter pairs(files.pairs(), true);
    for (const auto& p : scored.pairs) pairs.write(to_json(p));
    pairs.flush();
  }
  write_text_file(files.judge_cache(), cache.to_jsonl());
  write_text_file(files.report(), to_json(scored.report).dump(2, ' ', false, Json::error_handler_t::replace) + "\n");
}

}  // namespace castbench
