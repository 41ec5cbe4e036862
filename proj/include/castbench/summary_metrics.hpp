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

#ifndef CASTBENCH_SUMMARY_METRICS_HPP_
#define CASTBENCH_SUMMARY_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "castbench/matcher.hpp"
#include "castbench/stats.hpp"
#include "castbench/types.hpp"

namespace castbench {

inline constexpr double kDefaultAlpha = 0.9;

/// Scored comparison of two summaries. Serializes to the evaluation-record
/// key set: dataset, query, round_pair, stability_score, ..., matched_positions.
struct PairComparison {
  std::string dataset;
  std::string query;
  std::string round_pair;
  double stability_score = 0.0;
  double semantic_score = 0.0;
  double position_score = 0.0;
  double jaccard_index = 0.0;
  double original_match_ratio = 0.0;
  double average_match_ratio = 0.0;
  std::optional<double> kendall_tau;
  std::optional<double> kendall_p_value;
  std::size_t matched_items_count = 0;
  std::size_t group1_count = 0;
  std::size_t group2_count = 0;
  double size_difference = 0.0;
  std::vector<SemanticMatch> semantic_matches;
  stats::IndexSequence group1_positions;
  stats::IndexSequence group2_positions;
  std::string analysis_details;
};

/// "i-j" with 1-based run numbers.
std::string round_pair_label(std::size_t i, std::size_t j);

/// Mean similarity over matches; 0 for none.
double semantic_score(std::span<const SemanticMatch> matches);

/// Positional score from matched positions, with the sparse-match conventions:
/// one match scores 10 only when both summaries have a single bullet.
double position_score_for(std::span<const SemanticMatch> matches, std::size_t n1, std::size_t n2);

PairComparison cast_s(const SummaryOutput& left, const SummaryOutput& right,
                      double alpha = kDefaultAlpha, const JudgeSet& judges = JudgeSet::lexical(),
                      const MatchOptions& options = {});

/// Recomputes the composite for a new alpha without rematching.
PairComparison with_alpha(PairComparison pc, double alpha);

stats::AggregateStat aggregate_pairs(std::span<const PairComparison> comparisons);

Json to_json(const PairComparison& pc);
PairComparison pair_comparison_from_json(const Json& j);

/// Extracts the first JSON object from raw text (fences and prose tolerated)
/// and decodes it as a pair comparison record. Throws kMalformedOutput when no
/// object is found and kSchemaViolation when fields are missing.
PairComparison parse_evaluation_record(std::string_view raw);

}  // namespace castbench

#endif  // CASTBENCH_SUMMARY_METRICS_HPP_
