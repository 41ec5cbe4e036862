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

#include <cmath>
#include <deque>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "castbench/error.hpp"
#include "castbench/mock_provider.hpp"
#include "castbench/pipeline.hpp"

namespace castbench {
namespace {

const std::vector<std::string> kItems = {"The staff were friendly and helpful.", "Food arrived cold again.",
                                         "Prices went up a lot this year.", "Great music and lighting.",
                                         "Waiting time was far too long."};

ExperimentSpec spec(std::string method, Task task = Task::kSummarize, std::size_t n_runs = 10) {
  ExperimentSpec s;
  s.meta.dataset_id = "customer_feedback";
  s.meta.query = task == Task::kSummarize ? "Summarize the customer feedback" : "Tag the sentiment of each review";
  s.meta.method = std::move(method);
  s.meta.experiment_id = make_experiment_id(s.meta.dataset_id, s.meta.query, s.meta.method);
  s.meta.column_name = "review";
  s.meta.task = task;
  if (is_tagging(task)) s.meta.mode = TaggingMode::kIndependent;
  s.meta.n_runs = n_runs;
  s.items = kItems;
  return s;
}

// Replies from a fixed list indexed by sample.
class ListProvider final : public Provider {
 public:
  explicit ListProvider(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string id() const override { return "list"; }
  CompletionResult complete(const PromptSpec&, const DecodeParams&, std::size_t i) override {
    std::lock_guard lock(mu_);
    indices.insert(i);
    return {replies_.at(i % replies_.size()), 0.5, "list", 1};
  }
  std::set<std::size_t> indices;

 private:
  std::mutex mu_;
  std::vector<std::string> replies_;
};

std::string summary_json(const std::vector<std::string>& titles) {
  Json results = Json::array();
  for (const auto& t : titles) results.push_back(Json{{"Title", t}, {"Description", t + " details"}});
  return Json{{"TaskType", "Summary"}, {"OutputLanguage", "en_US"}, {"Results", results}}.dump();
}

RunRecord summary_record(std::size_t run_index, const std::vector<std::string>& titles) {
  RunRecord r;
  r.run_index = run_index;
  r.raw = summary_json(titles);
  r.parsed = parse_structured_output(r.raw, Task::kSummarize);
  return r;
}

TEST(RunExperiment, ProducesOneRecordPerRun) {
  MockProvider provider(MockConfig{});
  ExperimentSpec s = spec("cast");
  s.parallelism = 4;
  const auto records = run_experiment(s, provider);
  ASSERT_EQ(records.size(), 10u);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].run_index, i);
    EXPECT_EQ(records[i].method, "cast");
    EXPECT_TRUE(records[i].ok());
    EXPECT_GT(records[i].latency_s, 0.0);
  }
}

TEST(RunExperiment, ZeroNoiseMockIsByteIdentical) {
  MockConfig c;
  c.scenario = MockScenario::kCastLike;
  MockProvider provider(c);
  const auto records = run_experiment(spec("cast"), provider);
  for (const auto& r : records) EXPECT_EQ(r.raw, records[0].raw);
  const auto scored = score_experiment(spec("cast").meta, records, JudgeSet::lexical(), LexicalClusterer());
  ASSERT_TRUE(scored.report.stability);
  EXPECT_DOUBLE_EQ(scored.report.stability->mean, 10.0);
  EXPECT_EQ(format_mean_std(*scored.report.stability), "10.00 ± 0.00");
  EXPECT_EQ(scored.report.pair_count, 45u);
  EXPECT_DOUBLE_EQ(scored.report.path_entropy_bits, 0.0);
}

TEST(RunExperiment, AllMalformedIsDegenerate) {
  MockConfig c;
  c.p_malformed = 1.0;
  MockProvider provider(c);
  const ExperimentSpec s = spec("zeroshot_cot");
  const auto records = run_experiment(s, provider);
  for (const auto& r : records) EXPECT_FALSE(r.ok());
  const auto scored = score_experiment(s.meta, records, JudgeSet::lexical(), LexicalClusterer());
  EXPECT_TRUE(scored.report.degenerate);
  EXPECT_FALSE(scored.report.stability);
  EXPECT_NE(scored.report.degenerate_reason.find("0 of 10"), std::string::npos);
  EXPECT_THROW(pair_and_score(records, 0.9), Error);
}

TEST(RunExperiment, Preconditions) {
  MockProvider provider(MockConfig{});
  EXPECT_THROW(run_experiment(spec("cast", Task::kSummarize, 1), provider), Error);
  EXPECT_THROW(run_experiment(spec("bogus"), provider), Error);
}

TEST(PairAndScore, PairCounts) {
  std::vector<RunRecord> ten;
  for (std::size_t i = 0; i < 10; ++i) ten.push_back(summary_record(i, {"alpha", "beta"}));
  EXPECT_EQ(pair_and_score(ten, 0.9).pairs.size(), 45u);
  std::vector<RunRecord> three(ten.begin(), ten.begin() + 3);
  const auto scored = pair_and_score(three, 0.9);
  ASSERT_EQ(scored.pairs.size(), 3u);
  EXPECT_EQ(scored.pairs[0].round_pair, "1-2");
  EXPECT_EQ(scored.pairs[2].round_pair, "2-3");
}

TEST(PairAndScore, FailedRunScoresZero) {
  std::vector<RunRecord> records = {summary_record(0, {"alpha"}), summary_record(1, {"alpha"})};
  RunRecord bad;
  bad.run_index = 2;
  records.push_back(bad);
  const auto scored = pair_and_score(records, 0.9);
  EXPECT_DOUBLE_EQ(scored.pairs[0].stability_score, 10.0);
  EXPECT_DOUBLE_EQ(scored.pairs[1].stability_score, 0.0);
  EXPECT_DOUBLE_EQ(scored.pairs[2].stability_score, 0.0);
  EXPECT_NEAR(scored.stability.mean, 10.0 / 3.0, 1e-12);
}

TEST(PairAndScore, ParallelMatchesSerial) {
  MockProvider provider([] {
    MockConfig c;
    c.scenario = MockScenario::kUnconstrained;
    c.p_reorder = 0.5;
    c.p_paraphrase = 0.5;
    return c;
  }());
  const auto records = run_experiment(spec("zeroshot_cot"), provider);
  MatchOptions par;
  par.parallelism = 4;
  const auto a = pair_and_score(records, 0.9);
  const auto b = pair_and_score(records, 0.9, JudgeSet::lexical(), par);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) EXPECT_EQ(to_json(a.pairs[i]), to_json(b.pairs[i]));
}

TEST(SelfConsistency, PicksMedoidSample) {
  ListProvider provider({summary_json({"apples", "pears"}), summary_json({"apples", "pears"}),
                         summary_json({"trains", "planes"})});
  ExperimentSpec s = spec(std::string(kSelfConsistency), Task::kSummarize, 2);
  const RunRecord r = self_consistency(s, provider, 0);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.parsed.summary()->results[0].title, "apples");
  EXPECT_EQ(r.samples, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(r.latency_s, 1.5);
}

TEST(SelfConsistency, AllSamplesFailing) {
  ListProvider provider({"garbage"});
  const RunRecord r = self_consistency(spec(std::string(kSelfConsistency), Task::kSummarize, 2), provider, 1);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.parsed.error()->error.find("all 3 samples failed"), std::string::npos);
  EXPECT_EQ(r.samples, (std::vector<std::size_t>{3, 4, 5}));
}

TEST(SelfConsistency, TaggingMajorityVote) {
  auto tags = [](std::vector<std::string> t) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < t.size(); ++i) arr.push_back(Json{{"Index", i + 1}, {"Tag", t[i]}});
    return Json{{"TaskType", "Tagging"}, {"Tags", arr}}.dump();
  };
  ListProvider provider({tags({"pos", "neg", "neu", "pos", "neg"}), tags({"pos", "pos", "neu", "pos", "neg"}),
                         tags({"neg", "pos", "neu", "pos", "neg"})});
  const RunRecord r = self_consistency(spec(std::string(kSelfConsistency), Task::kTagIndependent, 2), provider, 0);
  ASSERT_TRUE(r.ok());
  const auto& voted = r.parsed.tags()->tags;
  EXPECT_EQ(voted[0], "pos");
  EXPECT_EQ(voted[1], "pos");
  EXPECT_EQ(voted[2], "neu");
}

TEST(PathEntropy, Examples) {
  std::vector<RunRecord> same;
  for (std::size_t i = 0; i < 10; ++i) same.push_back(summary_record(i, {"a"}));
  EXPECT_DOUBLE_EQ(path_entropy(same), 0.0);

  // Eight distinct signatures, each used once: log2(8) = 3.
  std::vector<RunRecord> distinct;
  for (std::size_t i = 0; i < 8; ++i) {
    RunRecord r;
    r.run_index = i;
    r.raw = Json{{"Domain", "domain " + std::to_string(i)}, {"Results", Json::array({Json{{"Title", "a"}}})}}.dump();
    r.parsed = parse_structured_output(r.raw, Task::kSummarize);
    distinct.push_back(r);
  }
  EXPECT_NEAR(path_entropy(distinct), 3.0, 1e-12);
  EXPECT_EQ(path_signature(RunRecord{}), std::string(kErrorSignature));
}

TEST(ScoreExperiment, TaggingWithGold) {
  MockProvider provider(MockConfig{});
  ExperimentSpec s = spec("cast", Task::kTagIndependent);
  s.meta.gold = {"Positive", "Negative", "Negative", "Positive", "Negative"};
  const auto records = run_experiment(s, provider);
  const auto scored = score_experiment(s.meta, records, JudgeSet::lexical(), LexicalClusterer());
  ASSERT_TRUE(scored.report.tagging);
  ASSERT_TRUE(scored.report.accuracy);
  EXPECT_GE(scored.report.accuracy->mean, 0.0);
  EXPECT_LE(scored.report.accuracy->mean, 100.0);
  EXPECT_EQ(scored.report.pair_count, 45u);
  EXPECT_TRUE(scored.pairs.empty());
}

TEST(Records, JsonRoundTrip) {
  MockProvider provider(MockConfig{});
  const ExperimentSpec s = spec("cast");
  const auto records = run_experiment(s, provider);
  for (const auto& r : records) EXPECT_EQ(to_json(run_record_from_json(to_json(r))), to_json(r));
  EXPECT_EQ(to_json(experiment_meta_from_json(to_json(s.meta))), to_json(s.meta));
  const auto scored = score_experiment(s.meta, records, JudgeSet::lexical(), LexicalClusterer());
  EXPECT_EQ(to_json(experiment_report_from_json(to_json(scored.report))), to_json(scored.report));
}

TEST(Report, RenderingIsStable) {
  MockProvider provider(MockConfig{});
  const ExperimentSpec s = spec("cast");
  const auto scored =
      score_experiment(s.meta, run_experiment(s, provider), JudgeSet::lexical(), LexicalClusterer());
  const std::vector<ExperimentReport> reports = {scored.report};
  const std::string md = render_report(reports, ReportFormat::kMarkdown);
  EXPECT_EQ(md, render_report(reports, ReportFormat::kMarkdown));
  EXPECT_NE(md.find("10.00 ± 0.00"), std::string::npos);
  const std::string csv = render_report(reports, ReportFormat::kCsv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  const std::string words = render_word_counts(reports);
  EXPECT_EQ(std::count(words.begin(), words.end(), '\n'), 11);
  EXPECT_EQ(scored.report.word_counts.size(), 10u);
}

TEST(ExperimentId, StableAndDistinct) {
  EXPECT_EQ(make_experiment_id("d", "Summarize it", "cast"), make_experiment_id("d", "Summarize it", "cast"));
  EXPECT_NE(make_experiment_id("d", "Summarize it", "cast"), make_experiment_id("d", "Summarize it!", "cast"));
  EXPECT_EQ(make_experiment_id("d", "q", "cast").find('/'), std::string::npos);
}

}  // namespace
}  // namespace castbench
