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

#ifndef CASTBENCH_MATCHER_HPP_
#define CASTBENCH_MATCHER_HPP_

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "castbench/types.hpp"

namespace castbench {

class Provider;

struct SemanticMatch {
  BulletItem left;
  BulletItem right;
  double similarity = 0.0;  // [0, 10]
};

struct RunTag {
  std::size_t run_index = 0;
  std::string tag;
};

struct TagCluster {
  std::string canonical_label;
  std::vector<RunTag> members;
};

/// Outcome placeholder for an item whose tag could not be recovered from a run.
inline constexpr std::string_view kMissingTag = "⟨MISSING⟩";

/// Text shown to judges: title and description, with topic words as hints.
std::string bullet_text(const BulletItem& b);

/// Scores semantic equivalence of two bullets on [0, 10]. Implementations
/// throw castbench::Error when they cannot produce a score.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual std::string id() const = 0;
  virtual double score(const BulletItem& a, const BulletItem& b) const = 0;
};

/// 10 x token-set Jaccard on normalized tokens of bullet_text().
class LexicalJudge final : public Judge {
 public:
  std::string id() const override { return "lexical"; }
  double score(const BulletItem& a, const BulletItem& b) const override;
};

/// Asks an LLM for a bare numeric rating. A malformed reply is retried once.
class LlmJudge final : public Judge {
 public:
  LlmJudge(std::string id, std::shared_ptr<Provider> provider, DecodeParams params);
  std::string id() const override { return id_; }
  double score(const BulletItem& a, const BulletItem& b) const override;

 private:
  std::string id_;
  std::shared_ptr<Provider> provider_;
  DecodeParams params_;
};

/// Parses a judge reply that must be a bare number; nullopt otherwise.
std::optional<double> parse_judge_reply(std::string_view reply);

PromptSpec build_judge_prompt(const BulletItem& a, const BulletItem& b);

/// Persistent store of judge scores keyed by (left hash, right hash, judge id).
class JudgeCache {
 public:
  static std::string key(const BulletItem& a, const BulletItem& b, const std::string& judge_id);

  std::optional<double> get(const std::string& key) const;
  void put(const std::string& key, double value);
  std::size_t size() const;

  /// Lines sorted by key so rewrites are byte-stable.
  std::string to_jsonl() const;
  void load_jsonl(std::string_view contents);

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, double> entries_;
};

class CachingJudge final : public Judge {
 public:
  CachingJudge(std::shared_ptr<const Judge> inner, std::shared_ptr<JudgeCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}
  std::string id() const override { return inner_->id(); }
  double score(const BulletItem& a, const BulletItem& b) const override;

 private:
  std::shared_ptr<const Judge> inner_;
  std::shared_ptr<JudgeCache> cache_;
};

/// Averages the judges that answer; throws kJudgeUnavailable if none do.
class JudgeSet {
 public:
  JudgeSet() = default;
  explicit JudgeSet(std::vector<std::shared_ptr<const Judge>> judges) : judges_(std::move(judges)) {}

  static JudgeSet lexical();

  double similarity(const BulletItem& a, const BulletItem& b) const;
  const std::vector<std::shared_ptr<const Judge>>& judges() const { return judges_; }
  bool empty() const { return judges_.empty(); }

 private:
  std::vector<std::shared_ptr<const Judge>> judges_;
};

double judge_similarity(const BulletItem& a, const BulletItem& b, const JudgeSet& judges);

enum class MatchStrategy { kGreedy, kOptimal };

struct MatchOptions {
  double threshold = 5.0;
  MatchStrategy strategy = MatchStrategy::kGreedy;
  std::size_t parallelism = 1;
};

/// Injective matching of bullets whose similarity exceeds the threshold.
/// Greedy: all pairs sorted by (similarity desc, left pos asc, right pos asc)
/// and accepted while both endpoints are free. Optimal: maximum total
/// similarity over the same admissible pairs. Output is ordered by left
/// position.
std::vector<SemanticMatch> match_bullets(std::span<const BulletItem> left,
                                         std::span<const BulletItem> right,
                                         const JudgeSet& judges, const MatchOptions& options = {});

struct ClusterResult {
  std::vector<TagCluster> clusters;
  std::vector<std::string> provenance;
};

class Clusterer {
 public:
  virtual ~Clusterer() = default;
  virtual ClusterResult cluster(std::span<const RunTag> tags) const = 0;
};

/// Groups by normalized form, then merges groups with token Jaccard >= 0.8.
/// Missing-tag sentinels always form singleton clusters.
class LexicalClusterer final : public Clusterer {
 public:
  explicit LexicalClusterer(double merge_jaccard = 0.8) : merge_jaccard_(merge_jaccard) {}
  ClusterResult cluster(std::span<const RunTag> tags) const override;

 private:
  double merge_jaccard_;
};

/// Asks an LLM for a grouping; falls back to LexicalClusterer on any failure.
class LlmClusterer final : public Clusterer {
 public:
  LlmClusterer(std::shared_ptr<Provider> provider, DecodeParams params)
      : provider_(std::move(provider)), params_(params) {}
  ClusterResult cluster(std::span<const RunTag> tags) const override;

 private:
  std::shared_ptr<Provider> provider_;
  DecodeParams params_;
};

PromptSpec build_cluster_prompt(std::span<const std::string> tags);

/// Parses {"Clusters": [[i, ...], ...]} and checks it partitions 0..n-1.
std::optional<std::vector<std::vector<std::size_t>>> parse_cluster_reply(std::string_view reply,
                                                                         std::size_t n);

ClusterResult cluster_tags(std::span<const RunTag> tags, const Clusterer& clusterer);

}  // namespace castbench

#endif  // CASTBENCH_MATCHER_HPP_
