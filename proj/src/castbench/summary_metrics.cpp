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

#include "castbench/summary_metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "castbench/error.hpp"
#include "castbench/prompts.hpp"

namespace castbench {

std::string round_pair_label(std::size_t i, std::size_t j) { return fmt::format("{}-{}", i + 1, j + 1); }

double semantic_score(std::span<const SemanticMatch> matches) {
  if (matches.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& m : matches) sum += m.similarity;
  return sum / static_cast<double>(matches.size());
}

double position_score_for(std::span<const SemanticMatch> matches, std::size_t n1, std::size_t n2) {
  if (n1 == 0 && n2 == 0) return 10.0;
  if (matches.empty()) return 0.0;
  if (matches.size() == 1) return n1 == 1 && n2 == 1 ? 10.0 : 0.0;
  stats::IndexSequence a, b;
  for (const auto& m : matches) {
    a.push_back(m.left.position);
    b.push_back(m.right.position);
  }
  return stats::positional_score(stats::kendall_tau(a, b));
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) contract_violation(fmt::format("alpha {} outside [0, 1]", alpha));
}

std::string describe(const PairComparison& pc) {
  std::string tau = pc.kendall_tau ? fmt::format("{:.4f}", *pc.kendall_tau) : "undefined";
  return fmt::format("{} of {}/{} bullets matched; kendall tau {}", pc.matched_items_count,
                     pc.group1_count, pc.group2_count, tau);
}

}  // namespace

PairComparison cast_s(const SummaryOutput& left, const SummaryOutput& right, double alpha,
                      const JudgeSet& judges, const MatchOptions& options) {
  check_alpha(alpha);
  PairComparison pc;
  pc.semantic_matches = match_bullets(left.results, right.results, judges, options);
  const std::size_t m = pc.semantic_matches.size();
  const std::size_t n1 = left.results.size();
  const std::size_t n2 = right.results.size();
  pc.matched_items_count = m;
  pc.group1_count = n1;
  pc.group2_count = n2;
  pc.size_difference = std::fabs(static_cast<double>(n1) - static_cast<double>(n2));
  for (const auto& match : pc.semantic_matches) {
    pc.group1_positions.push_back(match.left.position);
    pc.group2_positions.push_back(match.right.position);
  }

  if (n1 == 0 && n2 == 0) {
    pc.semantic_score = 10.0;
    pc.jaccard_index = pc.original_match_ratio = pc.average_match_ratio = 10.0;
  } else {
    const double dm = static_cast<double>(m);
    pc.semantic_score = semantic_score(pc.semantic_matches);
    pc.jaccard_index = 10.0 * dm / static_cast<double>(n1 + n2 - m);
    pc.original_match_ratio = 10.0 * dm / static_cast<double>(std::max(n1, n2));
    pc.average_match_ratio = 10.0 * dm / (static_cast<double>(n1 + n2) / 2.0);
  }
  if (m >= 2) {
    pc.kendall_tau = stats::kendall_tau(pc.group1_positions, pc.group2_positions);
    pc.kendall_p_value = stats::kendall_p_value(m, *pc.kendall_tau);
  }
  pc.position_score = position_score_for(pc.semantic_matches, n1, n2);
  pc.stability_score = alpha * pc.semantic_score + (1.0 - alpha) * pc.position_score;
  pc.analysis_details = describe(pc);
  return pc;
}

PairComparison with_alpha(PairComparison pc, double alpha) {
  check_alpha(alpha);
  pc.stability_score = alpha * pc.semantic_score + (1.0 - alpha) * pc.position_score;
  return pc;
}

stats::AggregateStat aggregate_pairs(std::span<const PairComparison> comparisons) {
  require(!comparisons.empty(), "aggregate_pairs: no comparisons");
  std::vector<double> scores;
  scores.reserve(comparisons.size());
  for (const auto& c : comparisons) scores.push_back(c.stability_score);
  return stats::mean_std(scores);
}

namespace {

Json item_json(const BulletItem& b) {
  return Json{{"Title", b.title}, {"Description", b.description}, {"Position", b.position}};
}

BulletItem item_from(const Json& j) {
  BulletItem b;
  b.title = j.value("Title", "");
  b.description = j.value("Description", "");
  b.topic_words = j.value("TopicWords", std::vector<std::string>{});
  b.position = j.value("Position", std::size_t{0});
  return b;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const PairComparison& pc) {
  Json j;
  j["dataset"] = pc.dataset;
  j["query"] = pc.query;
  j["round_pair"] = pc.round_pair;
  j["stability_score"] = pc.stability_score;
  j["semantic_score"] = pc.semantic_score;
  j["position_score"] = pc.position_score;
  j["jaccard_index"] = pc.jaccard_index;
  j["original_match_ratio"] = pc.original_match_ratio;
  j["average_match_ratio"] = pc.average_match_ratio;
  j["kendall_tau"] = optional_number(pc.kendall_tau);
  j["kendall_p_value"] = optional_number(pc.kendall_p_value);
  j["matched_items_count"] = pc.matched_items_count;
  j["group1_count"] = pc.group1_count;
  j["group2_count"] = pc.group2_count;
  j["size_difference"] = pc.size_difference;
  Json matches = Json::array();
  for (const auto& m : pc.semantic_matches) {
    matches.push_back(Json{{"Group1Item", item_json(m.left)},
                           {"Group2Item", item_json(m.right)},
                           {"SimilarityScore", m.similarity}});
  }
  j["semantic_matches"] = std::move(matches);
  j["matched_positions"] = Json{{"Group1Positions", pc.group1_positions},
                                {"Group2Positions", pc.group2_positions}};
  j["analysis_details"] = pc.analysis_details;
  return j;
}

PairComparison pair_comparison_from_json(const Json& j) {
  try {
    PairComparison pc;
    pc.dataset = j.at("dataset").get<std::string>();
    pc.query = j.at("query").get<std::string>();
    pc.round_pair = j.at("round_pair").get<std::string>();
    pc.stability_score = j.at("stability_score").get<double>();
    pc.semantic_score = j.at("semantic_score").get<double>();
    pc.position_score = j.at("position_score").get<double>();
    pc.jaccard_index = j.at("jaccard_index").get<double>();
    pc.original_match_ratio = j.at("original_match_ratio").get<double>();
    pc.average_match_ratio = j.at("average_match_ratio").get<double>();
    if (j.contains("kendall_tau") && j["kendall_tau"].is_number()) pc.kendall_tau = j["kendall_tau"].get<double>();
    if (j.contains("kendall_p_value") && j["kendall_p_value"].is_number()) {
      pc.kendall_p_value = j["kendall_p_value"].get<double>();
    }
    pc.matched_items_count = j.at("matched_items_count").get<std::size_t>();
    pc.group1_count = j.at("group1_count").get<std::size_t>();
    pc.group2_count = j.at("group2_count").get<std::size_t>();
    pc.size_difference = j.at("size_difference").get<double>();
    for (const auto& m : j.at("semantic_matches")) {
      pc.semantic_matches.push_back(
          {item_from(m.at("Group1Item")), item_from(m.at("Group2Item")), m.at("SimilarityScore").get<double>()});
    }
    const Json& pos = j.at("matched_positions");
    pc.group1_positions = pos.at("Group1Positions").get<stats::IndexSequence>();
    pc.group2_positions = pos.at("Group2Positions").get<stats::IndexSequence>();
    pc.analysis_details = j.value("analysis_details", "");
    return pc;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("pair comparison record: ") + e.what());
  }
}

PairComparison parse_evaluation_record(std::string_view raw) {
  const std::optional<Json> doc = extract_json_object(raw);
  if (!doc) throw Error(ErrorCode::kMalformedOutput, "no well-formed JSON object found in evaluation record");
  return pair_comparison_from_json(*doc);
}

}  // namespace castbench
