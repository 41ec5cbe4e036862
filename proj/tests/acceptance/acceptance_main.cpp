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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "castbench/commands.hpp"
#include "castbench/config.hpp"
#include "castbench/error.hpp"
#include "castbench/mock_provider.hpp"
#include "castbench/persistence.hpp"
#include "castbench/pipeline.hpp"
#include "castbench/prompts.hpp"
#include "castbench/rng.hpp"
#include "castbench/stats.hpp"
#include "castbench/summary_metrics.hpp"
#include "castbench/tagging_metrics.hpp"

namespace fs = std::filesystem;
using namespace castbench;

namespace {

const fs::path kSource = CASTBENCH_SOURCE_DIR;
const fs::path kFixtures = kSource / "tests" / "fixtures";

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failing check; later checks only add context on success.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && out_.pass) {
      out_.pass = false;
      out_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome done() const { return out_; }

 private:
  Outcome out_;
};

double brute_force_tau(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  long concordant = 0;
  long discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const long da = static_cast<long>(a[i]) - static_cast<long>(a[j]);
      const long db = static_cast<long>(b[i]) - static_cast<long>(b[j]);
      if (da * db > 0) ++concordant;
      if (da * db < 0) ++discordant;
    }
  }
  const double pairs = static_cast<double>(a.size() * (a.size() - 1) / 2);
  return static_cast<double>(concordant - discordant) / pairs;
}

Outcome kendall_oracle() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  std::size_t compared = 0;
  for (std::size_t m = 2; m <= 5; ++m) {
    std::vector<std::size_t> a(m);
    std::iota(a.begin(), a.end(), 0);
    do {
      std::vector<std::size_t> b(m);
      std::iota(b.begin(), b.end(), 0);
      do {
        const double got = stats::kendall_tau(a, b);
        c.expect(std::abs(got - brute_force_tau(a, b)) <= 1e-12, fmt::format("mismatch at length {}", m));
        ++compared;
      } while (std::next_permutation(b.begin(), b.end()));
    } while (std::next_permutation(a.begin(), a.end()));
  }
  Rng rng(20260101);
  for (std::size_t m = 6; m <= 8; ++m) {
    for (int s = 0; s < 500; ++s) {
      std::vector<std::size_t> a(m);
      std::vector<std::size_t> b(m);
      std::iota(a.begin(), a.end(), 0);
      std::iota(b.begin(), b.end(), 0);
      rng.shuffle(std::span<std::size_t>(a));
      rng.shuffle(std::span<std::size_t>(b));
      c.expect(std::abs(stats::kendall_tau(a, b) - brute_force_tau(a, b)) <= 1e-12,
               fmt::format("mismatch at sampled length {}", m));
      ++compared;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 5.0, fmt::format("took {:.2f} s", secs));
  c.note(fmt::format("{} sequence pairs, {:.3f} s", compared, secs));
  return c.done();
}

BulletItem bullet(std::string title, std::string description, std::size_t position) {
  return {std::move(title), std::move(description), {}, position};
}

SummaryOutput summary(std::vector<BulletItem> bullets) {
  SummaryOutput s;
  s.output_language = "en_US";
  s.column_name = "Feedback";
  for (std::size_t i = 0; i < bullets.size(); ++i) bullets[i].position = i;
  s.results = std::move(bullets);
  return s;
}

Outcome cast_s_endpoints() {
  Check c;
  const SummaryOutput left = summary({
      bullet("Friendly staff", "waiters were attentive and friendly to guests", 0),
      bullet("Cold food", "meals arrived cold at the table", 0),
      bullet("High prices", "menu prices feel expensive for portions", 0),
      bullet("Cozy ambiance", "lighting and music create a cozy mood", 0),
  });
  const PairComparison same = cast_s(left, left);
  c.expect(same.stability_score == 10.0, fmt::format("identical summaries scored {}", same.stability_score));

  // Reversed order with one extra word per description keeps every match above threshold.
  std::vector<BulletItem> rev;
  for (auto it = left.results.rbegin(); it != left.results.rend(); ++it) {
    rev.push_back(bullet(it->title, it->description + " overall", 0));
  }
  const SummaryOutput right = summary(rev);
  const PairComparison pc = cast_s(left, right, 0.9);
  const LexicalJudge judge;
  double s = 0.0;
  for (std::size_t i = 0; i < left.results.size(); ++i) {
    s += judge.score(left.results[i], right.results[left.results.size() - 1 - i]);
  }
  s /= static_cast<double>(left.results.size());
  c.expect(pc.matched_items_count == 4, fmt::format("{} matches", pc.matched_items_count));
  c.expect(pc.kendall_tau && std::abs(*pc.kendall_tau + 1.0) < 1e-12, "tau is not -1");
  c.expect(std::abs(pc.semantic_score - s) < 1e-9, fmt::format("S_sem {} vs oracle {}", pc.semantic_score, s));
  c.expect(std::abs(pc.stability_score - 0.9 * s) < 1e-9,
           fmt::format("composite {} vs 0.9 * {}", pc.stability_score, s));
  const PairComparison semantic_only = cast_s(left, right, 1.0);
  c.expect(std::abs(semantic_only.stability_score - semantic_only.semantic_score) < 1e-12,
           "alpha = 1 differs from semantic score");
  c.expect(std::abs(with_alpha(pc, 1.0).stability_score - s) < 1e-12, "rescoring at alpha = 1 differs");
  c.note(fmt::format("S_sem = {:.6f}, composite = {:.6f}", s, pc.stability_score));
  return c.done();
}

TagItem item_with(std::string id, std::vector<std::string> tags) { return {std::move(id), std::move(tags), {}}; }

std::vector<std::string> repeated(const std::vector<std::pair<std::string, int>>& counts) {
  std::vector<std::string> out;
  for (const auto& [tag, n] : counts) out.insert(out.end(), static_cast<std::size_t>(n), tag);
  return out;
}

Outcome cast_t_bounds() {
  Check c;
  TagRunSet runs;
  runs.n_runs = 10;
  runs.items.push_back(item_with("0", repeated({{"Positive", 10}})));
  runs.items.push_back(item_with("1", repeated({{"Positive", 7}, {"Negative", 2}, {"Neutral", 1}})));
  runs.items.push_back(item_with("2", {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
                                       "india", "juliett"}));
  const TaggingStability t = cast_t(runs);
  const std::vector<double> expected = {10.0, 7.0, 1.0};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    c.expect(t.per_item.at(i).score == expected[i], fmt::format("item {} scored {}", i, t.per_item[i].score));
  }
  c.expect(t.dataset_score == (10.0 + 7.0 + 1.0) / 3.0, fmt::format("dataset score {}", t.dataset_score));
  c.note("per-item 10.0, 7.0, 1.0; dataset 6.0");
  return c.done();
}

ExperimentSpec mock_spec(const std::string& method, std::size_t n_runs) {
  const auto rows = parse_csv(read_text_file(kSource / "data" / "customer_feedback.csv"));
  ExperimentSpec spec;
  for (std::size_t r = 1; r < rows.size(); ++r) spec.items.push_back(rows[r].at(1));
  ExperimentMeta& m = spec.meta;
  m.dataset_id = "customer_feedback";
  m.query = "Summarize the customer feedback";
  m.method = method;
  m.column_name = "Feedback";
  m.provider = "mock";
  m.n_runs = n_runs;
  m.experiment_id = make_experiment_id(m.dataset_id, m.query, method);
  for (std::size_t i = 0; i < spec.items.size(); ++i) {
    m.item_ids.push_back(std::to_string(i));
    m.gold.emplace_back(std::nullopt);
  }
  return spec;
}

Outcome protocol_fidelity() {
  Check c;
  for (double p_malformed : {0.0, 0.3}) {
    MockConfig cfg;
    cfg.scenario = MockScenario::kUnconstrained;
    cfg.p_reorder = 0.5;
    cfg.p_malformed = p_malformed;
    MockProvider provider(cfg);
    const ExperimentSpec spec = mock_spec("zeroshot_cot", 10);
    const auto records = run_experiment(spec, provider);
    const ScoredExperiment scored = score_experiment(spec.meta, records, JudgeSet::lexical(), LexicalClusterer());
    c.expect(scored.pairs.size() == 45, fmt::format("{} pairs at p_malformed {}", scored.pairs.size(), p_malformed));
    c.expect(scored.report.pair_count == 45, "report pair_count is not 45");
  }
  for (std::size_t n = 2; n <= 10; ++n) {
    // Exactly one identical pair (runs 0 and 1) among C(n, 2).
    TagRunSet runs;
    runs.n_runs = n;
    std::vector<std::string> cells;
    for (std::size_t r = 0; r < n; ++r) cells.push_back(r < 2 ? "same" : fmt::format("tag{}", r));
    runs.items.push_back(item_with("0", cells));
    const double expected = 1.0 / static_cast<double>(n * (n - 1) / 2);
    c.expect(std::abs(match_ratio(runs) - expected) < 1e-12, fmt::format("match ratio denominator wrong at n = {}", n));
  }
  c.note("45 pairs for 10 runs; match-ratio denominator C(n, 2) for n = 2..10");
  return c.done();
}

Outcome entropy_fixtures() {
  Check c;
  auto entropy = [](const std::vector<std::string>& xs) {
    return stats::shannon_entropy(stats::EmpiricalDistribution::from_outcomes(xs));
  };
  const double identical = entropy(repeated({{"a", 10}}));
  const double distinct = entropy({"a", "b", "c", "d", "e", "f", "g", "h"});
  const double mixed = entropy(repeated({{"a", 7}, {"b", 2}, {"c", 1}}));
  const double oracle = -(0.7 * std::log2(0.7) + 0.2 * std::log2(0.2) + 0.1 * std::log2(0.1));
  c.expect(identical == 0.0, fmt::format("identical x10 gave {}", identical));
  c.expect(std::abs(distinct - 3.0) < 1e-12, fmt::format("distinct x8 gave {}", distinct));
  c.expect(std::abs(mixed - 1.1568) < 1e-4, fmt::format("{{7,2,1}} gave {}", mixed));
  c.expect(std::abs(mixed - oracle) < 1e-12, "{7,2,1} disagrees with closed form");
  c.note(fmt::format("0, {:.4f}, {:.4f} bits", distinct, mixed));
  return c.done();
}

void write_config(const fs::path& path, const fs::path& out) {
  Json cfg = {
      {"output_root", out.string()},
      {"datasets", Json::array({Json{{"id", "customer_feedback"},
                                     {"path", (kSource / "data" / "customer_feedback.csv").string()},
                                     {"column_name", "Feedback"},
                                     {"gold_column", "Sentiment"}}})},
      {"queries", Json::array({Json{{"text", "Summarize the feedback in at most 4 bullet points"}},
                               Json{{"text", "Tag each item with its sentiment"}, {"task", "tag"},
                                    {"mode", "independent"}}})},
      {"methods", Json::array({"cast", "zeroshot_cot", "self_consistency"})},
      {"n_runs", 10},
      {"provider", "mock"},
      {"mock", Json{{"seed", 7}, {"p_reorder", 0.5}, {"p_paraphrase", 0.3}, {"p_topic_jitter", 0.2},
                    {"p_malformed", 0.1}, {"scenario", "unconstrained"},
                    {"scenario_by_method", Json{{"cast", "cast_like"}}}}},
      {"parallelism", 4},
  };
  write_text_file(path, cfg.dump(2));
}

Outcome mock_determinism() {
  Check c;
  const fs::path root = fs::temp_directory_path() / fmt::format("castbench_accept_{}", ::getpid());
  fs::remove_all(root);
  std::vector<fs::path> outs = {root / "a", root / "b"};
  for (const auto& out : outs) {
    const fs::path cfg = root / (out.filename().string() + ".json");
    fs::create_directories(root);
    write_config(cfg, out);
    std::ostringstream log;
    const int code = cmd_run(cfg, {}, log);
    c.expect(code == kExitOk || code == kExitDegenerate, fmt::format("cmd_run exit {}", code));
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(outs[0])) {
    for (const char* name : {"runs.jsonl", "pairs.jsonl", "report.json"}) {
      const fs::path a = entry.path() / name;
      const fs::path b = outs[1] / entry.path().filename() / name;
      c.expect(fs::exists(a) && fs::exists(b), fmt::format("missing {}", b.string()));
      if (fs::exists(a) && fs::exists(b)) {
        c.expect(read_text_file(a) == read_text_file(b), fmt::format("{} differs", (entry.path().filename() / name).string()));
        ++compared;
      }
    }
  }
  c.expect(compared == 18, fmt::format("compared {} files, expected 18", compared));
  fs::remove_all(root);
  c.note(fmt::format("{} artifact files byte-identical across two runs", compared));
  return c.done();
}

struct ScenarioResult {
  double entropy = 0.0;
  double cast_s = 0.0;
};

ScenarioResult run_scenario(MockScenario scenario, const std::string& method, std::uint64_t seed) {
  MockConfig cfg;
  cfg.seed = seed;
  cfg.p_reorder = 0.5;
  cfg.scenario = scenario;
  MockProvider provider(cfg);
  const ExperimentSpec spec = mock_spec(method, 10);
  const auto records = run_experiment(spec, provider);
  const ScoredExperiment scored = score_experiment(spec.meta, records, JudgeSet::lexical(), LexicalClusterer());
  return {scored.report.path_entropy_bits, scored.report.stability ? scored.report.stability->mean : 0.0};
}

Outcome scenario_direction() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  int satisfied = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ScenarioResult cast = run_scenario(MockScenario::kCastLike, "cast", seed);
    const ScenarioResult free = run_scenario(MockScenario::kUnconstrained, "zeroshot_cot", seed);
    if (cast.entropy < free.entropy && cast.cast_s > free.cast_s) ++satisfied;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(satisfied >= 18, fmt::format("only {}/20 seeds satisfy both orderings", satisfied));
  c.expect(secs < 30.0, fmt::format("took {:.1f} s", secs));
  c.note(fmt::format("{}/20 seeds, {:.2f} s", satisfied, secs));
  return c.done();
}

Outcome schema_fixtures() {
  Check c;
  const std::string record_text = read_text_file(kFixtures / "evaluation_record.json");
  const PairComparison pc = parse_evaluation_record(record_text);
  c.expect(pc.matched_items_count == 4, "matched_items_count != 4");
  c.expect(pc.group1_count == 4 && pc.group2_count == 4, "group counts != 4/4");
  const stats::IndexSequence positions = {0, 1, 2, 3};
  c.expect(pc.group1_positions == positions && pc.group2_positions == positions, "positions != [0,1,2,3]");
  c.expect(pc.semantic_matches.size() == 1 && pc.semantic_matches[0].similarity == 4.5, "semantic_matches differ");
  c.expect(to_json(pc) == Json::parse(record_text), "record does not round-trip");
  c.expect(pc.kendall_p_value && std::abs(*pc.kendall_p_value - stats::kendall_p_value(4, 1.0)) < 1e-15,
           "exact p-value for m = 4, tau = 1 disagrees with the record");
  c.expect(parse_evaluation_record("```json\n" + record_text + "\n```").matched_items_count == 4,
           "fenced record rejected");

  const ParsedOutput fenced = parse_structured_output(read_text_file(kFixtures / "summary_fenced.txt"), Task::kSummarize);
  c.expect(fenced.summary() && fenced.summary()->results.size() == 4, "fenced summary did not yield 4 bullets");

  const ParsedOutput bad = parse_structured_output("hello", Task::kSummarize);
  c.expect(bad.error() != nullptr, "malformed input accepted");
  if (bad.error()) {
    const Json shape = serialize_error(*bad.error());
    c.expect(shape.size() == 2 && shape.at("TaskType") == "Summary" && shape.at("Error").is_string() &&
                 !shape.at("Error").get<std::string>().empty(),
             "error shape is not {TaskType: Summary, Error: ...}");
    c.expect(bad.error()->kind == ErrorCode::kMalformedOutput, "wrong error kind");
  }
  c.note("record round-trips; malformed input gives {TaskType, Error}");
  return c.done();
}

// Returns a fixed response regardless of the prompt.
class CannedProvider final : public Provider {
 public:
  explicit CannedProvider(std::string text) : text_(std::move(text)) {}
  std::string id() const override { return "canned"; }
  CompletionResult complete(const PromptSpec&, const DecodeParams&, std::size_t) override {
    return {text_, 0.5, "canned", 1};
  }

 private:
  std::string text_;
};

Outcome algorithm_guard() {
  Check c;
  const Json bullet_json = {{"Title", "Service"}, {"Description", "Staff were friendly."}, {"TopicWords", {"staff"}}};
  Json empty_topics = {{"TaskType", "Summary"},   {"OutputLanguage", "en_US"},
                       {"ColumnName", "Feedback"}, {"Domain", "Restaurant"},
                       {"Perspective", {{"NumTopics", 0}, {"TopWords", Json::array()}}},
                       {"Results", Json::array({bullet_json})}};
  Json empty_clusters = empty_topics;
  empty_clusters["Perspective"] = {{"NumTopics", 1}, {"TopWords", {"staff"}}};
  empty_clusters["Clusters"] = Json::array();

  for (const auto& [name, doc] : {std::pair{"topics", empty_topics}, std::pair{"clusters", empty_clusters}}) {
    const ParsedOutput p = parse_structured_output(doc.dump(), Task::kSummarize, 0, true);
    c.expect(!p.ok(), fmt::format("empty {} accepted by the parser", name));
    CannedProvider provider(doc.dump());
    const ExperimentSpec spec = mock_spec("cast", 3);
    const auto records = run_experiment(spec, provider);
    const bool all_errors = std::all_of(records.begin(), records.end(), [](const RunRecord& r) { return !r.ok(); });
    c.expect(all_errors, fmt::format("empty {} produced a parsed run", name));
    const ScoredExperiment scored = score_experiment(spec.meta, records, JudgeSet::lexical(), LexicalClusterer());
    c.expect(scored.report.degenerate && scored.report.successful_runs == 0 && !scored.report.stability,
             fmt::format("empty {} was scored", name));
  }
  c.note("empty topics and empty clusters both take the error path");
  return c.done();
}

Outcome pearson_fixtures() {
  Check c;
  const std::vector<std::pair<std::string, double>> cases = {{"perfect", 1.0}, {"anti", -1.0}, {"half", 0.5}};
  std::vector<std::string> summary;
  for (const auto& [name, expected] : cases) {
    const auto scores = kFixtures / fmt::format("pearson_{}_scores.csv", name);
    const auto human = kFixtures / fmt::format("pearson_{}_human.csv", name);
    std::ostringstream log;
    c.expect(cmd_validate_metric(scores, human, std::nullopt, log) == kExitOk, name + ": nonzero exit");
    const auto result = validate_metric(scores, human);
    c.expect(result.size() == 1, name + ": expected one metric column");
    if (result.empty()) continue;
    c.expect(std::abs(result[0].r - expected) < 1e-9, fmt::format("{}: r = {}", name, result[0].r));
    if (name == "perfect") {
      c.expect(result[0].n >= 8, "perfect fixture has fewer than 8 pairs");
      c.expect(result[0].p < 0.01, fmt::format("perfect: p = {}", result[0].p));
    }
    summary.push_back(fmt::format("{} r={:.3f} p={:.4f}", name, result[0].r, result[0].p));
  }
  c.note(fmt::format("{}", fmt::join(summary, "; ")));
  return c.done();
}

SummaryOutput random_summary(Rng& rng) {
  SummaryOutput s;
  s.output_language = "en_US";
  s.column_name = "Feedback";
  const std::size_t n = 2 + rng.below(9);
  const std::size_t others_at = rng.bernoulli(0.7) ? rng.below(n) : n;
  for (std::size_t i = 0; i < n; ++i) {
    BulletItem b;
    b.title = i == others_at ? (rng.bernoulli(0.5) ? "Others" : "Miscellaneous") : fmt::format("Topic {}", i);
    b.description = fmt::format("description {}", rng.below(1000));
    b.topic_words = {fmt::format("word{}", rng.below(50))};
    b.position = i;
    s.results.push_back(b);
  }
  if (rng.bernoulli(0.3)) {
    // A second Others-like bullet.
    s.results.insert(s.results.begin() + static_cast<std::ptrdiff_t>(rng.below(s.results.size())),
                     BulletItem{"Other topics", "more", {"misc"}, 0});
  }
  return s;
}

Outcome refinement_invariants() {
  Check c;
  Rng rng(11);
  std::size_t with_violations = 0;
  for (int i = 0; i < 200; ++i) {
    const SummaryOutput s = random_summary(rng);
    QueryConstraints q;
    q.max_bullets = 1 + rng.below(s.results.size());
    if (rng.bernoulli(0.3)) q.output_language = "fr";
    IntermediateStates st;
    if (rng.bernoulli(0.5)) {
      for (std::size_t b = 0; b < s.results.size(); ++b) {
        st.clusters.push_back({s.results[b].title, std::vector<std::size_t>(1 + rng.below(5), 1)});
      }
    }
    const auto violations = validate_constraints(s, q, &st);
    if (!violations.empty()) ++with_violations;
    const RefineResult r = refine_output(s, violations, q, &st);
    c.expect(r.output.results.size() <= s.results.size(), fmt::format("sample {} grew", i));
    const auto others = std::count_if(r.output.results.begin(), r.output.results.end(),
                                      [](const BulletItem& b) { return is_others_title(b.title); });
    c.expect(others <= 1, fmt::format("sample {} has {} Others bullets", i, others));
    if (others == 1) c.expect(is_others_title(r.output.results.back().title), fmt::format("sample {}: Others not last", i));
    c.expect(!r.llm_called, "deterministic pass called an LLM");
  }
  c.expect(with_violations >= 150, fmt::format("only {} samples carried violations", with_violations));
  c.note(fmt::format("200 samples, {} with violations", with_violations));
  return c.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"kendall-oracle-equivalence", kendall_oracle},
      {"cast-s-endpoints", cast_s_endpoints},
      {"cast-t-bounds", cast_t_bounds},
      {"protocol-fidelity", protocol_fidelity},
      {"entropy-fixtures", entropy_fixtures},
      {"mock-determinism", mock_determinism},
      {"scenario-direction", scenario_direction},
      {"schema-fixtures", schema_fixtures},
      {"intermediate-guard", algorithm_guard},
      {"pearson-fixtures", pearson_fixtures},
      {"refinement-invariants", refinement_invariants},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << fmt::format("{} {:>2} {:<28} {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
  }
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
                           criteria.size());
  return failures == 0 ? 0 : 1;
}
