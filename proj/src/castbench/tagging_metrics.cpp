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

#include "castbench/tagging_metrics.hpp"

#include <fmt/format.h>

#include "castbench/error.hpp"
#include "castbench/text.hpp"

namespace castbench {

void TagRunSet::validate() const {
  require(n_runs >= 1, "TagRunSet: n_runs must be at least 1");
  for (const auto& item : items) {
    if (item.tags.size() != n_runs) {
      contract_violation(fmt::format("TagRunSet: item '{}' has {} tags for {} runs", item.item_id,
                                     item.tags.size(), n_runs));
    }
  }
}

TaggingStability cast_t(const TagRunSet& runs, const Clusterer& clusterer) {
  runs.validate();
  require(!runs.items.empty(), "cast_t: no items");
  TaggingStability out;
  double sum = 0.0;
  for (const auto& item : runs.items) {
    std::vector<RunTag> tags;
    for (std::size_t r = 0; r < item.tags.size(); ++r) tags.push_back({r, item.tags[r]});
    const ClusterResult clusters = cluster_tags(tags, clusterer);
    std::vector<std::size_t> sizes;
    for (const auto& c : clusters.clusters) sizes.push_back(c.members.size());
    const double score = 10.0 * stats::majority_ratio(sizes, runs.n_runs);
    out.per_item.push_back({item.item_id, score});
    sum += score;
    for (const auto& note : clusters.provenance) {
      out.provenance.push_back(fmt::format("item {}: {}", item.item_id, note));
    }
  }
  out.dataset_score = sum / static_cast<double>(runs.items.size());
  out.match_ratio = runs.n_runs >= 2 ? match_ratio(runs) : 1.0;
  out.mean_entropy_bits = tag_entropy(runs);
  return out;
}

double match_ratio(const TagRunSet& runs) {
  runs.validate();
  require(runs.n_runs >= 2, "match_ratio: needs at least two runs");
  std::size_t identical = 0;
  for (std::size_t a = 0; a < runs.n_runs; ++a) {
    for (std::size_t b = a + 1; b < runs.n_runs; ++b) {
      bool same = true;
      for (const auto& item : runs.items) {
        const std::string& x = item.tags[a];
        const std::string& y = item.tags[b];
        if (x == kMissingTag || y == kMissingTag || text::trim(x) != text::trim(y)) {
          same = false;
          break;
        }
      }
      if (same) ++identical;
    }
  }
  return static_cast<double>(identical) / static_cast<double>(stats::pair_count(runs.n_runs));
}

double tag_entropy(const TagRunSet& runs) {
  runs.validate();
  if (runs.items.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& item : runs.items) {
    stats::EmpiricalDistribution d;
    for (const auto& t : item.tags) d.add(text::trim(t));
    sum += stats::shannon_entropy(d);
  }
  return sum / static_cast<double>(runs.items.size());
}

stats::AggregateStat accuracy(const TagRunSet& runs) {
  runs.validate();
  require(runs.mode == TaggingMode::kIndependent, "accuracy: defined for independent tagging only");
  if (runs.items.empty()) throw Error(ErrorCode::kNoGold, "accuracy: no items");
  for (const auto& item : runs.items) {
    if (!item.gold) throw Error(ErrorCode::kNoGold, fmt::format("item '{}' has no gold label", item.item_id));
  }
  std::vector<double> per_run;
  for (std::size_t r = 0; r < runs.n_runs; ++r) {
    std::size_t correct = 0;
    for (const auto& item : runs.items) {
      const std::string& pred = item.tags[r];
      if (pred != kMissingTag && text::normalize(pred) == text::normalize(*item.gold)) ++correct;
    }
    per_run.push_back(100.0 * static_cast<double>(correct) / static_cast<double>(runs.items.size()));
  }
  return stats::mean_std(per_run);
}

Json to_json(const TaggingStability& t) {
  Json items = Json::array();
  for (const auto& i : t.per_item) items.push_back(Json{{"item_id", i.item_id}, {"score", i.score}});
  return Json{{"per_item", std::move(items)},
              {"dataset_score", t.dataset_score},
              {"match_ratio", t.match_ratio},
              {"mean_entropy_bits", t.mean_entropy_bits},
              {"provenance", t.provenance}};
}

}  // namespace castbench
