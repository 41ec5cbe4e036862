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

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include <gtest/gtest.h>

#include "castbench/error.hpp"
#include "castbench/llm_client.hpp"
#include "castbench/matcher.hpp"
#include "castbench/rng.hpp"
#include "castbench/summary_metrics.hpp"
#include "castbench/tagging_metrics.hpp"

namespace castbench {
namespace {

BulletItem bullet(std::string title, std::string description = "", std::size_t position = 0) {
  return {std::move(title), std::move(description), {}, position};
}

SummaryOutput summary(std::vector<BulletItem> bullets) {
  SummaryOutput s;
  s.output_language = "en_US";
  for (std::size_t i = 0; i < bullets.size(); ++i) bullets[i].position = i;
  s.results = std::move(bullets);
  return s;
}

SummaryOutput four_bullets() {
  return summary({bullet("Friendly staff", "waiters were attentive"), bullet("Cold food", "meals arrived cold"),
                  bullet("High prices", "menu feels expensive"), bullet("Cozy ambiance", "lighting and music")});
}

// Replies from a queue; records prompts.
class ScriptedProvider final : public Provider {
 public:
  explicit ScriptedProvider(std::deque<std::string> replies) : replies_(std::move(replies)) {}
  std::string id() const override { return "scripted"; }
  CompletionResult complete(const PromptSpec& prompt, const DecodeParams&, std::size_t) override {
    prompts.push_back(prompt);
    if (replies_.empty()) throw Error(ErrorCode::kProviderError, "no scripted reply left");
    std::string r = replies_.front();
    replies_.pop_front();
    return {r, 0.1, "scripted", 1};
  }
  std::vector<PromptSpec> prompts;

 private:
  std::deque<std::string> replies_;
};

TEST(LexicalJudge, Examples) {
  const LexicalJudge j;
  const BulletItem a = bullet("Customer Service", "friendly staff");
  EXPECT_DOUBLE_EQ(j.score(a, a), 10.0);
  EXPECT_DOUBLE_EQ(j.score(bullet("apples oranges"), bullet("trains planes")), 0.0);
  // {exceptional, customer, service, and, support} vs {customer, service, and, support}: 4 / 5.
  EXPECT_NEAR(j.score(bullet("Exceptional Customer Service and Support"), bullet("Customer Service and Support")),
              8.0, 1e-12);
}

TEST(LexicalJudge, SymmetricAndBounded) {
  const LexicalJudge j;
  Rng rng(3);
  const std::vector<std::string> words = {"price", "staff", "food", "cold", "late", "music", "clean", "rude"};
  for (int t = 0; t < 100; ++t) {
    std::string x, y;
    for (int k = 0; k < 4; ++k) {
      x += words[rng.below(words.size())] + " ";
      y += words[rng.below(words.size())] + " ";
    }
    const double s = j.score(bullet(x), bullet(y));
    EXPECT_DOUBLE_EQ(s, j.score(bullet(y), bullet(x)));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 10.0);
  }
}

TEST(LlmJudge, ParsesBareNumbersAndRetriesOnce) {
  EXPECT_EQ(parse_judge_reply(" 7.5\n"), 7.5);
  EXPECT_FALSE(parse_judge_reply("about 7"));
  EXPECT_FALSE(parse_judge_reply(""));

  auto ok = std::make_shared<ScriptedProvider>(std::deque<std::string>{"not a number", "6.25"});
  LlmJudge judge("j", ok, {});
  EXPECT_DOUBLE_EQ(judge.score(bullet("a"), bullet("b")), 6.25);
  EXPECT_EQ(ok->prompts.size(), 2u);
  EXPECT_EQ(ok->prompts[0].task, Task::kJudgeSimilarity);

  auto bad = std::make_shared<ScriptedProvider>(std::deque<std::string>{"x", "y"});
  LlmJudge failing("j", bad, {});
  try {
    failing.score(bullet("a"), bullet("b"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kJudgeUnavailable);
  }
}

TEST(JudgeSet, FallsBackToAnsweringJudges) {
  auto dead = std::make_shared<LlmJudge>("dead", std::make_shared<ScriptedProvider>(std::deque<std::string>{}),
                                         DecodeParams{});
  JudgeSet set({dead, std::make_shared<LexicalJudge>()});
  EXPECT_DOUBLE_EQ(set.similarity(bullet("x y"), bullet("x y")), 10.0);
  JudgeSet only_dead({dead});
  EXPECT_THROW(only_dead.similarity(bullet("x"), bullet("x")), Error);
}

TEST(JudgeCache, CachingJudgeAvoidsRepeatCallsAndRoundTrips) {
  auto provider = std::make_shared<ScriptedProvider>(std::deque<std::string>{"4"});
  auto cache = std::make_shared<JudgeCache>();
  CachingJudge judge(std::make_shared<LlmJudge>("llm", provider, DecodeParams{}), cache);
  EXPECT_DOUBLE_EQ(judge.score(bullet("a"), bullet("b")), 4.0);
  EXPECT_DOUBLE_EQ(judge.score(bullet("a"), bullet("b")), 4.0);
  EXPECT_EQ(provider->prompts.size(), 1u);

  JudgeCache reloaded;
  reloaded.load_jsonl(cache->to_jsonl());
  EXPECT_EQ(reloaded.to_jsonl(), cache->to_jsonl());
  EXPECT_EQ(reloaded.get(JudgeCache::key(bullet("a"), bullet("b"), "llm")), 4.0);
}

TEST(MatchBullets, Examples) {
  const SummaryOutput s = four_bullets();
  const auto m = match_bullets(s.results, s.results, JudgeSet::lexical());
  ASSERT_EQ(m.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m[i].left.position, i);
    EXPECT_EQ(m[i].right.position, i);
  }
  EXPECT_TRUE(match_bullets({}, s.results, JudgeSet::lexical()).empty());
  const std::vector<BulletItem> x = {bullet("apples")};
  const std::vector<BulletItem> y = {bullet("trains")};
  EXPECT_TRUE(match_bullets(x, y, JudgeSet::lexical()).empty());
}

TEST(MatchBullets, InjectiveAboveThresholdForBothStrategies) {
  Rng rng(17);
  const std::vector<std::string> words = {"price", "staff", "food", "cold", "late", "music"};
  for (int t = 0; t < 60; ++t) {
    std::vector<BulletItem> left, right;
    for (std::size_t i = 0; i < 1 + rng.below(6); ++i) {
      left.push_back(bullet(words[rng.below(6)] + " " + words[rng.below(6)], "", i));
    }
    for (std::size_t i = 0; i < 1 + rng.below(6); ++i) {
      right.push_back(bullet(words[rng.below(6)] + " " + words[rng.below(6)], "", i));
    }
    for (auto strategy : {MatchStrategy::kGreedy, MatchStrategy::kOptimal}) {
      MatchOptions o;
      o.strategy = strategy;
      const auto m = match_bullets(left, right, JudgeSet::lexical(), o);
      std::set<std::size_t> l, r;
      for (const auto& x : m) {
        EXPECT_GE(x.similarity, o.threshold);
        EXPECT_TRUE(l.insert(x.left.position).second);
        EXPECT_TRUE(r.insert(x.right.position).second);
      }
      EXPECT_TRUE(std::is_sorted(m.begin(), m.end(), [](const SemanticMatch& a, const SemanticMatch& b) {
        return a.left.position < b.left.position;
      }));
    }
  }
}

TEST(MatchBullets, ParallelAgreesWithSerial) {
  const SummaryOutput s = four_bullets();
  MatchOptions par;
  par.parallelism = 4;
  const auto a = match_bullets(s.results, s.results, JudgeSet::lexical());
  const auto b = match_bullets(s.results, s.results, JudgeSet::lexical(), par);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].similarity, b[i].similarity);
}

std::vector<std::size_t> cluster_sizes(const std::vector<std::string>& tags, const Clusterer& c) {
  std::vector<RunTag> rt;
  for (std::size_t i = 0; i < tags.size(); ++i) rt.push_back({i, tags[i]});
  std::vector<std::size_t> sizes;
  for (const auto& cl : cluster_tags(rt, c).clusters) sizes.push_back(cl.members.size());
  return sizes;
}

TEST(LexicalClusterer, Examples) {
  const LexicalClusterer c;
  EXPECT_EQ(cluster_sizes({"pos", "pos", "pos"}, c), (std::vector<std::size_t>{3}));
  EXPECT_EQ(cluster_sizes({"Customer Service", "customer service", "Billing"}, c), (std::vector<std::size_t>{2, 1}));
  std::vector<std::string> distinct;
  for (int i = 0; i < 10; ++i) distinct.push_back("tag" + std::to_string(i));
  EXPECT_EQ(cluster_sizes(distinct, c), std::vector<std::size_t>(10, 1));
  const std::string missing(kMissingTag);
  EXPECT_EQ(cluster_sizes({missing, missing, "a"}, c), (std::vector<std::size_t>{1, 1, 1}));
}

TEST(LlmClusterer, UsesReplyAndFallsBack) {
  EXPECT_TRUE(parse_cluster_reply(R"({"Clusters": [[0, 2], [1]]})", 3));
  EXPECT_FALSE(parse_cluster_reply(R"({"Clusters": [[0, 0], [1]]})", 2));
  EXPECT_FALSE(parse_cluster_reply(R"({"Clusters": [[0]]})", 2));

  auto good = std::make_shared<ScriptedProvider>(std::deque<std::string>{R"({"Clusters": [[0, 1], [2]]})"});
  LlmClusterer llm(good, {});
  EXPECT_EQ(cluster_sizes({"happy", "glad", "glad", "sad"}, llm), (std::vector<std::size_t>{3, 1}));

  auto broken = std::make_shared<ScriptedProvider>(std::deque<std::string>{"nonsense"});
  LlmClusterer fallback(broken, {});
  std::vector<RunTag> rt = {{0, "a"}, {1, "a"}, {2, "b"}};
  const auto result = cluster_tags(rt, fallback);
  EXPECT_EQ(result.clusters.size(), 2u);
  EXPECT_FALSE(result.provenance.empty());
}

TEST(SemanticScore, Examples) {
  auto sims = [](std::vector<double> v) {
    std::vector<SemanticMatch> m;
    for (double s : v) m.push_back({bullet("a"), bullet("b"), s});
    return semantic_score(m);
  };
  EXPECT_DOUBLE_EQ(sims({10, 10, 10}), 10.0);
  EXPECT_DOUBLE_EQ(sims({}), 0.0);
  EXPECT_DOUBLE_EQ(sims({9.0, 8.0}), 8.5);
}

TEST(CastS, IdenticalSummaries) {
  const PairComparison pc = cast_s(four_bullets(), four_bullets());
  EXPECT_DOUBLE_EQ(pc.semantic_score, 10.0);
  EXPECT_DOUBLE_EQ(pc.position_score, 10.0);
  EXPECT_DOUBLE_EQ(pc.stability_score, 10.0);
  EXPECT_EQ(pc.matched_items_count, 4u);
  EXPECT_EQ(pc.group1_positions, (stats::IndexSequence{0, 1, 2, 3}));
  ASSERT_TRUE(pc.kendall_p_value);
  EXPECT_NEAR(*pc.kendall_p_value, 1.0 / 12.0, 1e-15);
}

TEST(CastS, CompositeArithmetic) {
  PairComparison pc;
  pc.semantic_score = 9.0;
  pc.position_score = 10.0;
  EXPECT_NEAR(with_alpha(pc, 0.9).stability_score, 9.1, 1e-12);
  EXPECT_NEAR(with_alpha(pc, 1.0).stability_score, 9.0, 1e-12);
  EXPECT_THROW(with_alpha(pc, 1.5), Error);
}

TEST(CastS, ReversedOrder) {
  const SummaryOutput left = four_bullets();
  std::vector<BulletItem> rev(left.results.rbegin(), left.results.rend());
  const PairComparison pc = cast_s(left, summary(rev));
  EXPECT_DOUBLE_EQ(pc.position_score, 0.0);
  EXPECT_NEAR(pc.stability_score, 0.9 * pc.semantic_score, 1e-12);
}

TEST(CastS, SparseConventions) {
  const SummaryOutput empty = summary({});
  const PairComparison both_empty = cast_s(empty, empty);
  EXPECT_DOUBLE_EQ(both_empty.stability_score, 10.0);
  EXPECT_FALSE(both_empty.kendall_tau);

  const PairComparison none = cast_s(summary({bullet("apples")}), summary({bullet("trains")}));
  EXPECT_DOUBLE_EQ(none.stability_score, 0.0);
  EXPECT_FALSE(none.kendall_tau);

  const PairComparison single = cast_s(summary({bullet("apples")}), summary({bullet("apples")}));
  EXPECT_DOUBLE_EQ(single.position_score, 10.0);
  const PairComparison one_of_two =
      cast_s(summary({bullet("apples"), bullet("pears")}), summary({bullet("apples"), bullet("trains")}));
  EXPECT_EQ(one_of_two.matched_items_count, 1u);
  EXPECT_DOUBLE_EQ(one_of_two.position_score, 0.0);
  EXPECT_FALSE(one_of_two.kendall_p_value);
}

TEST(CastS, DiagnosticRatios) {
  const PairComparison pc =
      cast_s(summary({bullet("apples"), bullet("pears"), bullet("plums")}), summary({bullet("apples"), bullet("pears")}));
  EXPECT_EQ(pc.matched_items_count, 2u);
  EXPECT_NEAR(pc.jaccard_index, 10.0 * 2 / 3, 1e-12);
  EXPECT_NEAR(pc.original_match_ratio, 10.0 * 2 / 3, 1e-12);
  EXPECT_NEAR(pc.average_match_ratio, 10.0 * 2 / 2.5, 1e-12);
  EXPECT_DOUBLE_EQ(pc.size_difference, 1.0);
}

TEST(CastS, BoundedAndSymmetricOnRandomSummaries) {
  Rng rng(23);
  const std::vector<std::string> words = {"price", "staff", "food", "cold", "late", "music", "clean"};
  for (int t = 0; t < 100; ++t) {
    auto make = [&] {
      std::vector<BulletItem> b;
      for (std::size_t i = 0; i < rng.below(6); ++i) b.push_back(bullet(words[rng.below(7)] + " " + words[rng.below(7)]));
      return summary(b);
    };
    const SummaryOutput a = make();
    const SummaryOutput b = make();
    const PairComparison ab = cast_s(a, b);
    EXPECT_GE(ab.stability_score, 0.0);
    EXPECT_LE(ab.stability_score, 10.0);
    EXPECT_EQ(ab.matched_items_count, cast_s(b, a).matched_items_count);
    EXPECT_DOUBLE_EQ(cast_s(a, a).stability_score, 10.0);
  }
}

TEST(AggregatePairs, Examples) {
  std::vector<PairComparison> pcs(45);
  for (auto& p : pcs) p.stability_score = 10.0;
  const auto all_ten = aggregate_pairs(pcs);
  EXPECT_DOUBLE_EQ(all_ten.mean, 10.0);
  EXPECT_DOUBLE_EQ(all_ten.std, 0.0);
  std::vector<PairComparison> two(2);
  two[0].stability_score = 9.0;
  two[1].stability_score = 10.0;
  EXPECT_NEAR(aggregate_pairs(two).std, 0.7071, 1e-4);
  EXPECT_DOUBLE_EQ(aggregate_pairs(std::vector<PairComparison>(1)).std, 0.0);
}

TEST(PairComparisonJson, RoundTrip) {
  PairComparison pc = cast_s(four_bullets(), four_bullets());
  pc.dataset = "d";
  pc.query = "q";
  pc.round_pair = round_pair_label(0, 1);
  EXPECT_EQ(pc.round_pair, "1-2");
  const Json j = to_json(pc);
  const PairComparison back = pair_comparison_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_THROW(pair_comparison_from_json(Json{{"dataset", "x"}}), Error);
}

TagRunSet run_set(std::vector<std::vector<std::string>> cells, std::vector<std::optional<std::string>> gold = {}) {
  TagRunSet r;
  r.n_runs = cells.empty() ? 0 : cells[0].size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    r.items.push_back({std::to_string(i), cells[i], i < gold.size() ? gold[i] : std::nullopt});
  }
  return r;
}

TEST(CastT, Examples) {
  std::vector<std::string> distinct;
  for (int i = 0; i < 10; ++i) distinct.push_back("tag" + std::to_string(i));
  const auto t = cast_t(run_set({std::vector<std::string>(10, "A"),
                                 {"A", "A", "A", "A", "A", "A", "A", "B", "B", "C"},
                                 distinct}));
  EXPECT_DOUBLE_EQ(t.per_item[0].score, 10.0);
  EXPECT_DOUBLE_EQ(t.per_item[1].score, 7.0);
  EXPECT_DOUBLE_EQ(t.per_item[2].score, 1.0);
  EXPECT_DOUBLE_EQ(t.dataset_score, 6.0);
  EXPECT_THROW(cast_t(run_set({{"A", "B"}, {"A"}})), Error);
}

TEST(CastT, ScoreWithinDispersionBounds) {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(9);
    std::vector<std::string> cells;
    for (std::size_t r = 0; r < n; ++r) cells.push_back("t" + std::to_string(rng.below(4)));
    const double s = cast_t(run_set({cells})).per_item[0].score;
    EXPECT_GE(s, 10.0 / static_cast<double>(n) - 1e-12);
    EXPECT_LE(s, 10.0);
  }
}

TEST(MatchRatio, Examples) {
  EXPECT_DOUBLE_EQ(match_ratio(run_set({std::vector<std::string>(10, "x")})), 1.0);
  EXPECT_DOUBLE_EQ(match_ratio(run_set({{"A", "A", "A", "B"}})), 0.5);
  EXPECT_DOUBLE_EQ(match_ratio(run_set({{"A", "B", "C"}})), 0.0);
  // A pair with a missing cell never counts as identical.
  const std::string missing(kMissingTag);
  EXPECT_DOUBLE_EQ(match_ratio(run_set({{missing, missing}})), 0.0);
  EXPECT_DOUBLE_EQ(match_ratio(run_set({{"A ", "A"}})), 1.0);
}

TEST(TagEntropy, Examples) {
  EXPECT_DOUBLE_EQ(tag_entropy(run_set({std::vector<std::string>(10, "x")})), 0.0);
  EXPECT_NEAR(tag_entropy(run_set({{"A", "A", "A", "A", "A", "A", "A", "B", "B", "C"}})), 1.1568, 1e-4);
  std::vector<std::string> distinct;
  for (int i = 0; i < 10; ++i) distinct.push_back(std::to_string(i));
  EXPECT_NEAR(tag_entropy(run_set({distinct})), std::log2(10.0), 1e-12);
}

TEST(Accuracy, Examples) {
  const auto perfect = accuracy(run_set({{"Pos", "Pos"}, {"Neg", "Neg"}}, {"pos", "neg"}));
  EXPECT_DOUBLE_EQ(perfect.mean, 100.0);
  EXPECT_DOUBLE_EQ(perfect.std, 0.0);
  const auto one_wrong = accuracy(run_set({{"a", "a"}, {"b", "b"}, {"c", "c"}, {"x", "x"}}, {"a", "b", "c", "d"}));
  EXPECT_DOUBLE_EQ(one_wrong.mean, 75.0);
  EXPECT_DOUBLE_EQ(one_wrong.std, 0.0);
  // Run accuracies 90 and 100.
  std::vector<std::vector<std::string>> cells;
  std::vector<std::optional<std::string>> gold;
  for (int i = 0; i < 10; ++i) {
    cells.push_back({i == 0 ? "wrong" : "ok", "ok"});
    gold.emplace_back("ok");
  }
  const auto mixed = accuracy(run_set(cells, gold));
  EXPECT_DOUBLE_EQ(mixed.mean, 95.0);
  EXPECT_NEAR(mixed.std, 7.071, 1e-3);
}

TEST(Accuracy, Errors) {
  try {
    accuracy(run_set({{"a", "a"}}, {std::nullopt}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoGold);
  }
  TagRunSet joint = run_set({{"a", "a"}}, {"a"});
  joint.mode = TaggingMode::kJoint;
  EXPECT_THROW(accuracy(joint), Error);
}

}  // namespace
}  // namespace castbench
