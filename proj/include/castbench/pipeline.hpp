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

#ifndef CASTBENCH_PIPELINE_HPP_
#define CASTBENCH_PIPELINE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "castbench/llm_client.hpp"
#include "castbench/matcher.hpp"
#include "castbench/prompts.hpp"
#include "castbench/stats.hpp"
#include "castbench/summary_metrics.hpp"
#include "castbench/tagging_metrics.hpp"
#include "castbench/types.hpp"

namespace castbench {

class JsonlWriter;

inline constexpr std::string_view kErrorSignature = "⟨ERROR⟩";
inline constexpr std::string_view kSelfConsistency = "self_consistency";

/// Validates a method name: a prompt variant or "self_consistency".
bool is_known_method(std::string_view method);

/// Everything needed to rescore an experiment from its persisted runs.
struct ExperimentMeta {
  std::string experiment_id;
  std::string dataset_id;
  std::string query;
  std::string method;
  std::string column_name;
  std::string language = "en_US";
  std::string provider;
  std::optional<std::string> scenario;
  Task task = Task::kSummarize;
  std::optional<TaggingMode> mode;
  std::size_t n_runs = 10;
  double alpha = kDefaultAlpha;
  MatchOptions match;
  std::vector<std::string> judges = {"lexical"};
  std::vector<std::string> item_ids;
  std::vector<std::optional<std::string>> gold;
};

Json to_json(const ExperimentMeta& m);
ExperimentMeta experiment_meta_from_json(const Json& j);

struct ExperimentSpec {
  ExperimentMeta meta;
  std::vector<std::string> items;
  DecodeParams decode;
  std::size_t self_consistency_k = 3;
  std::vector<Json> few_shot;  // empty: shipped exemplars
  std::size_t parallelism = 1;
  bool llm_refine = false;
};

struct RunRecord {
  std::string experiment_id;
  std::string dataset_id;
  std::string query;
  std::string method;
  Task task = Task::kSummarize;
  std::size_t run_index = 0;
  DecodeParams decode;
  std::string provider;
  std::string raw;
  ParsedOutput parsed{ErrorRecord{"Summary", "not run", ErrorCode::kMalformedOutput}, {}};
  std::vector<Violation> residual_violations;
  double latency_s = 0.0;
  std::size_t attempt_count = 0;
  /// Sample indices consolidated into this record (self-consistency only).
  std::vector<std::size_t> samples;

  bool ok() const { return parsed.ok(); }
};

Json to_json(const RunRecord& r);
RunRecord run_record_from_json(const Json& j);

/// Stable directory-safe id for a (dataset, query, method) cell.
std::string make_experiment_id(std::string_view dataset_id, std::string_view query,
                               std::string_view method);

/// The prompt a method sends (self-consistency samples the zero-shot CoT prompt).
PromptSpec build_prompt(const ExperimentSpec& spec);

/// n_runs independent completions, each parsed, validated and (for the
/// algorithmic-prompting variants) refined. Per-run failures become error
/// records. Records are written in run order when a writer is given.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, Provider& provider,
                                      JsonlWriter* writer = nullptr);

/// k zero-shot CoT samples consolidated into one record: medoid summary, or
/// per-item majority tags with lowest-sample tie-break.
RunRecord self_consistency(const ExperimentSpec& spec, Provider& provider, std::size_t run_index,
                           const JudgeSet& judges = JudgeSet::lexical());

struct PairScoring {
  std::vector<PairComparison> pairs;
  stats::AggregateStat stability;
};

/// All C(n, 2) run pairs. Pairs involving an error run score 0 and are kept.
/// Throws kInsufficientRuns when fewer than two runs parsed.
PairScoring pair_and_score(const std::vector<RunRecord>& records, double alpha,
                           const JudgeSet& judges = JudgeSet::lexical(),
                           const MatchOptions& options = {});

/// Canonical signature of a run's intermediate states.
std::string path_signature(const RunRecord& r);

/// Shannon entropy (bits) over path signatures.
double path_entropy(const std::vector<RunRecord>& records);

/// Per-item tag table across runs; error runs contribute missing cells.
TagRunSet tag_run_set(const ExperimentMeta& meta, const std::vector<RunRecord>& records);

struct ExperimentReport {
  std::string experiment_id;
  std::string dataset_id;
  std::string query;
  std::string method;
  std::optional<std::string> scenario;
  Task task = Task::kSummarize;
  std::size_t n_runs = 0;
  std::size_t successful_runs = 0;
  bool degenerate = false;
  std::string degenerate_reason;
  double alpha = kDefaultAlpha;
  std::optional<stats::AggregateStat> stability;
  stats::AggregateStat timing;
  std::size_t pair_count = 0;
  std::optional<TaggingStability> tagging;
  std::optional<stats::AggregateStat> accuracy;
  double path_entropy_bits = 0.0;
  std::vector<std::size_t> word_counts;
};

Json to_json(const ExperimentReport& r);
ExperimentReport experiment_report_from_json(const Json& j);

struct ScoredExperiment {
  ExperimentReport report;
  std::vector<PairComparison> pairs;
};

/// Scores persisted or fresh runs; never throws for degenerate experiments,
/// which are flagged in the report instead.
ScoredExperiment score_experiment(const ExperimentMeta& meta, const std::vector<RunRecord>& records,
                                  const JudgeSet& judges, const Clusterer& clusterer);

/// Words in the final answer of a run (titles and descriptions, or tags).
std::size_t output_word_count(const RunRecord& r);

enum class ReportFormat { kMarkdown, kCsv };

/// Experiment table sorted by (dataset, query, method), then path entropy per method.
std::string render_report(std::vector<ExperimentReport> reports, ReportFormat format);

/// experiment_id,dataset,query,method,run_index,word_count
std::string render_word_counts(std::vector<ExperimentReport> reports);

/// "mean ± std" at two decimals.
std::string format_mean_std(const stats::AggregateStat& s);

/// Persists one experiment directory: experiment.json, runs.jsonl, pairs.jsonl,
/// judge_cache.jsonl, report.json.
struct ExperimentFiles {
  explicit ExperimentFiles(std::filesystem::path dir) : dir(std::move(dir)) {}
  std::filesystem::path dir;
  std::filesystem::path meta() const { return dir / "experiment.json"; }
  std::filesystem::path runs() const { return dir / "runs.jsonl"; }
  std::filesystem::path pairs() const { return dir / "pairs.jsonl"; }
  std::filesystem::path judge_cache() const { return dir / "judge_cache.jsonl"; }
  std::filesystem::path report() const { return dir / "report.json"; }
};

void write_scored(const ExperimentFiles& files, const ScoredExperiment& scored,
                  const JudgeCache& cache);

}  // namespace castbench

#endif  // CASTBENCH_PIPELINE_HPP_
