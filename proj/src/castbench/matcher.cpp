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

#include "castbench/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <regex>
#include <set>

#include "castbench/assets.hpp"
#include "castbench/error.hpp"
#include "castbench/llm_client.hpp"
#include "castbench/prompts.hpp"
#include "castbench/text.hpp"

namespace castbench {
namespace {

Json bullet_payload(const BulletItem& b) {
  return Json{{"Title", b.title}, {"Description", b.description}, {"TopicWords", b.topic_words}};
}

std::string bullet_block(const BulletItem& b) {
  std::string s = "Title: " + b.title + "\nDescription: " + b.description;
  if (!b.topic_words.empty()) s += "\nTopic words (hints): " + text::join(b.topic_words, ", ");
  return s;
}

bool is_missing(std::string_view tag) { return tag == kMissingTag; }

// Maximum-weight assignment on a square matrix (Hungarian method, minimizing
// the negated weights). Returns row -> column.
std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  const std::size_t n = weight.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::string bullet_text(const BulletItem& b) {
  std::string s = b.title;
  if (!b.description.empty()) s += " " + b.description;
  for (const auto& w : b.topic_words) s += " " + w;
  return s;
}

double LexicalJudge::score(const BulletItem& a, const BulletItem& b) const {
  return 10.0 * text::token_jaccard(bullet_text(a), bullet_text(b));
}

LlmJudge::LlmJudge(std::string id, std::shared_ptr<Provider> provider, DecodeParams params)
    : id_(std::move(id)), provider_(std::move(provider)), params_(params) {
  require(provider_ != nullptr, "LlmJudge requires a provider");
}

double LlmJudge::score(const BulletItem& a, const BulletItem& b) const {
  const PromptSpec prompt = build_judge_prompt(a, b);
  for (std::size_t attempt = 0; attempt < 2; ++attempt) {
    const CompletionResult r = provider_->complete(prompt, params_, attempt);
    if (auto value = parse_judge_reply(r.text)) return std::clamp(*value, 0.0, 10.0);
  }
  throw Error(ErrorCode::kJudgeUnavailable, "judge " + id_ + " returned malformed replies twice");
}

std::optional<double> parse_judge_reply(std::string_view reply) {
  static const std::regex number(R"(^[+-]?(\d+(\.\d*)?|\.\d+)$)");
  const std::string trimmed = text::trim(reply);
  if (!std::regex_match(trimmed, number)) return std::nullopt;
  const double value = std::stod(trimmed);
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

PromptSpec build_judge_prompt(const BulletItem& a, const BulletItem& b) {
  PromptSpec p;
  p.task = Task::kJudgeSimilarity;
  p.input_payload = Json{{"Left", bullet_payload(a)}, {"Right", bullet_payload(b)}};
  p.rendered_text = render_template(assets::get("templates/judge_similarity.md"),
                                    {{"LEFT", bullet_block(a)}, {"RIGHT", bullet_block(b)}});
  return p;
}

std::string JudgeCache::key(const BulletItem& a, const BulletItem& b, const std::string& judge_id) {
  return text::sha256_hex(bullet_text(a)) + ":" + text::sha256_hex(bullet_text(b)) + ":" + judge_id;
}

std::optional<double> JudgeCache::get(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void JudgeCache::put(const std::string& key, double value) {
  std::lock_guard lock(mu_);
  entries_[key] = value;
}

std::size_t JudgeCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::string JudgeCache::to_jsonl() const {
  std::map<std::string, double> sorted;
  {
    std::lock_guard lock(mu_);
    sorted.insert(entries_.begin(), entries_.end());
  }
  std::string out;
  for (const auto& [k, v] : sorted) {
    const auto first = k.find(':');
    const auto second = k.find(':', first + 1);
    Json line{{"left", k.substr(0, first)},
              {"right", k.substr(first + 1, second - first - 1)},
              {"judge", k.substr(second + 1)},
              {"score", v}};
    out += line.dump() + "\n";
  }
  return out;
}

void JudgeCache::load_jsonl(std::string_view contents) {
  std::size_t start = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    const std::string line = text::trim(contents.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("score")) continue;
    put(j.value("left", "") + ":" + j.value("right", "") + ":" + j.value("judge", ""),
        j["score"].get<double>());
  }
}

double CachingJudge::score(const BulletItem& a, const BulletItem& b) const {
  const std::string k = JudgeCache::key(a, b, inner_->id());
  if (auto hit = cache_->get(k)) return *hit;
  const double value = inner_->score(a, b);
  cache_->put(k, value);
  return value;
}

JudgeSet JudgeSet::lexical() { return JudgeSet({std::make_shared<LexicalJudge>()}); }

double JudgeSet::similarity(const BulletItem& a, const BulletItem& b) const {
  require(!judges_.empty(), "judge set is empty");
  double sum = 0.0;
  std::size_t answered = 0;
  std::string failures;
  for (const auto& judge : judges_) {
    try {
      sum += std::clamp(judge->score(a, b), 0.0, 10.0);
      ++answered;
    } catch (const Error& e) {
      failures += (failures.empty() ? "" : "; ") + judge->id() + ": " + e.what();
    }
  }
  if (answered == 0) throw Error(ErrorCode::kJudgeUnavailable, "all judges failed: " + failures);
  return sum / static_cast<double>(answered);
}

double judge_similarity(const BulletItem& a, const BulletItem& b, const JudgeSet& judges) {
  return judges.similarity(a, b);
}

std::vector<SemanticMatch> match_bullets(std::span<const BulletItem> left,
                                         std::span<const BulletItem> right,
                                         const JudgeSet& judges, const MatchOptions& options) {
  require(options.threshold >= 0.0 && options.threshold <= 10.0, "match threshold outside [0, 10]");
  if (left.empty() || right.empty()) return {};

  const std::size_t n1 = left.size();
  const std::size_t n2 = right.size();
  std::vector<std::vector<double>> sim(n1, std::vector<double>(n2, 0.0));
  auto fill_row = [&](std::size_t i) {
    for (std::size_t j = 0; j < n2; ++j) sim[i][j] = judges.similarity(left[i], right[j]);
  };
  if (options.parallelism > 1 && n1 > 1) {
    std::vector<std::future<void>> pending;
    for (std::size_t i = 0; i < n1; ++i) {
      pending.push_back(std::async(std::launch::async, fill_row, i));
      if (pending.size() >= options.parallelism) {
        for (auto& f : pending) f.get();
        pending.clear();
      }
    }
    for (auto& f : pending) f.get();
  } else {
    for (std::size_t i = 0; i < n1; ++i) fill_row(i);
  }

  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  if (options.strategy == MatchStrategy::kGreedy) {
    struct Candidate {
      double similarity;
      std::size_t i, j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        if (sim[i][j] >= options.threshold) candidates.push_back({sim[i][j], i, j});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
      if (x.similarity != y.similarity) return x.similarity > y.similarity;
      if (left[x.i].position != left[y.i].position) return left[x.i].position < left[y.i].position;
      return right[x.j].position < right[y.j].position;
    });
    std::vector<bool> left_used(n1, false), right_used(n2, false);
    for (const auto& c : candidates) {
      if (left_used[c.i] || right_used[c.j]) continue;
      left_used[c.i] = right_used[c.j] = true;
      chosen.emplace_back(c.i, c.j);
    }
  } else {
    const std::size_t n = std::max(n1, n2);
    std::vector<std::vector<double>> weight(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        // Admissible pairs carry a bonus so that the assignment prefers more
        // admissible matches before higher similarity.
        if (sim[i][j] >= options.threshold) weight[i][j] = 1000.0 + sim[i][j];
      }
    }
    const auto assignment = max_weight_assignment(weight);
    for (std::size_t i = 0; i < n1; ++i) {
      const std::size_t j = assignment[i];
      if (j < n2 && sim[i][j] >= options.threshold) chosen.emplace_back(i, j);
    }
  }

  std::sort(chosen.begin(), chosen.end(), [&](const auto& x, const auto& y) {
    return left[x.first].position < left[y.first].position;
  });
  std::vector<SemanticMatch> matches;
  matches.reserve(chosen.size());
  for (const auto& [i, j] : chosen) matches.push_back({left[i], right[j], sim[i][j]});
  return matches;
}

ClusterResult LexicalClusterer::cluster(std::span<const RunTag> tags) const {
  require(!tags.empty(), "cluster_tags: no tags");
  // Group by normalized form, first appearance order.
  std::vector<std::string> forms;
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> form_index;
  std::vector<std::size_t> singletons;  // missing sentinels
  for (std::size_t k = 0; k < tags.size(); ++k) {
    if (is_missing(tags[k].tag)) {
      forms.emplace_back();
      groups.push_back({k});
      singletons.push_back(groups.size() - 1);
      continue;
    }
    const std::string form = text::normalize(tags[k].tag);
    const auto [it, inserted] = form_index.emplace(form, groups.size());
    if (inserted) {
      forms.push_back(form);
      groups.push_back({k});
    } else {
      groups[it->second].push_back(k);
    }
  }

  std::vector<std::size_t> parent(groups.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  const std::set<std::size_t> sentinel(singletons.begin(), singletons.end());
  for (std::size_t a = 0; a < groups.size(); ++a) {
    if (sentinel.count(a)) continue;
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      if (sentinel.count(b)) continue;
      if (text::token_jaccard(forms[a], forms[b]) >= merge_jaccard_) {
        const std::size_t ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> merged;  // root -> tag indices
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& members = merged[find(g)];
    members.insert(members.end(), groups[g].begin(), groups[g].end());
  }
  std::vector<std::vector<std::size_t>> ordered;
  for (auto& [_, members] : merged) {
    std::sort(members.begin(), members.end());
    ordered.push_back(std::move(members));
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });

  ClusterResult result;
  for (const auto& members : ordered) {
    TagCluster c;
    std::map<std::string, std::size_t> freq;
    for (std::size_t k : members) {
      c.members.push_back(tags[k]);
      ++freq[tags[k].tag];
    }
    std::size_t best = 0;
    for (std::size_t k : members) {
      if (freq[tags[k].tag] > best) {
        best = freq[tags[k].tag];
        c.canonical_label = tags[k].tag;
      }
    }
    result.clusters.push_back(std::move(c));
  }
  return result;
}

PromptSpec build_cluster_prompt(std::span<const std::string> tags) {
  PromptSpec p;
  p.task = Task::kJudgeClusters;
  std::string listing;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    listing += "[" + std::to_string(i) + "] " + tags[i] + "\n";
  }
  p.input_payload = Json{{"Tags", std::vector<std::string>(tags.begin(), tags.end())}};
  p.rendered_text = render_template(assets::get("templates/judge_clusters.md"),
                                    {{"TAGS", listing}, {"COUNT", std::to_string(tags.size())}});
  return p;
}

std::optional<std::vector<std::vector<std::size_t>>> parse_cluster_reply(std::string_view reply,
                                                                         std::size_t n) {
  const auto doc = extract_json_object(reply);
  if (!doc || !doc->contains("Clusters") || !(*doc)["Clusters"].is_array()) return std::nullopt;
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<bool> seen(n, false);
  for (const auto& group : (*doc)["Clusters"]) {
    if (!group.is_array() || group.empty()) return std::nullopt;
    std::vector<std::size_t> members;
    for (const auto& idx : group) {
      if (!idx.is_number_integer()) return std::nullopt;
      const auto k = idx.get<long long>();
      if (k < 0 || static_cast<std::size_t>(k) >= n || seen[static_cast<std::size_t>(k)]) {
        return std::nullopt;
      }
      seen[static_cast<std::size_t>(k)] = true;
      members.push_back(static_cast<std::size_t>(k));
    }
    clusters.push_back(std::move(members));
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) return std::nullopt;
  return clusters;
}

ClusterResult LlmClusterer::cluster(std::span<const RunTag> tags) const {
  require(!tags.empty(), "cluster_tags: no tags");
  std::vector<std::string> distinct;
  std::map<std::string, std::size_t> distinct_index;
  for (const auto& t : tags) {
    if (is_missing(t.tag)) continue;
    if (distinct_index.emplace(t.tag, distinct.size()).second) distinct.push_back(t.tag);
  }

  std::vector<std::vector<std::size_t>> grouping;
  std::string failure;
  if (!distinct.empty()) {
    try {
      const auto reply = provider_->complete(build_cluster_prompt(distinct), params_, 0);
      if (auto parsed = parse_cluster_reply(reply.text, distinct.size())) {
        grouping = std::move(*parsed);
      } else {
        failure = "unparseable clustering reply";
      }
    } catch (const Error& e) {
      failure = e.what();
    }
  }
  if (!failure.empty()) {
    ClusterResult fallback = LexicalClusterer().cluster(tags);
    fallback.provenance.push_back("llm clustering failed (" + failure + "); used lexical fallback");
    return fallback;
  }

  std::vector<std::size_t> group_of(distinct.size(), 0);
  for (std::size_t g = 0; g < grouping.size(); ++g) {
    for (std::size_t k : grouping[g]) group_of[k] = g;
  }
  std::vector<TagCluster> by_group(grouping.size());
  std::vector<std::size_t> first_seen(grouping.size(), tags.size());
  ClusterResult result;
  std::vector<std::pair<std::size_t, TagCluster>> missing;
  for (std::size_t k = 0; k < tags.size(); ++k) {
    if (is_missing(tags[k].tag)) {
      missing.push_back({k, TagCluster{tags[k].tag, {tags[k]}}});
      continue;
    }
    const std::size_t g = group_of[distinct_index[tags[k].tag]];
    by_group[g].members.push_back(tags[k]);
    first_seen[g] = std::min(first_seen[g], k);
  }
  std::vector<std::pair<std::size_t, TagCluster>> ordered = std::move(missing);
  for (std::size_t g = 0; g < by_group.size(); ++g) {
    std::map<std::string, std::size_t> freq;
    std::size_t best = 0;
    for (const auto& m : by_group[g].members) ++freq[m.tag];
    for (const auto& m : by_group[g].members) {
      if (freq[m.tag] > best) {
        best = freq[m.tag];
        by_group[g].canonical_label = m.tag;
      }
    }
    ordered.push_back({first_seen[g], std::move(by_group[g])});
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& [_, c] : ordered) result.clusters.push_back(std::move(c));
  return result;
}

ClusterResult cluster_tags(std::span<const RunTag> tags, const Clusterer& clusterer) {
  return clusterer.cluster(tags);
}

}  // namespace castbench
