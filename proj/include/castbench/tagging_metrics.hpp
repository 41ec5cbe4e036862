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

#ifndef CASTBENCH_TAGGING_METRICS_HPP_
#define CASTBENCH_TAGGING_METRICS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "castbench/matcher.hpp"
#include "castbench/stats.hpp"
#include "castbench/types.hpp"

namespace castbench {

struct TagItem {
  std::string item_id;
  std::vector<std::string> tags;  // one cell per run; kMissingTag when absent
  std::optional<std::string> gold;
};

struct TagRunSet {
  std::vector<TagItem> items;
  std::size_t n_runs = 0;
  TaggingMode mode = TaggingMode::kIndependent;

  /// Throws kContractViolation unless every item has exactly n_runs cells.
  void validate() const;
};

struct ItemScore {
  std::string item_id;
  double score = 0.0;
};

struct TaggingStability {
  std::vector<ItemScore> per_item;
  double dataset_score = 0.0;
  double match_ratio = 0.0;
  double mean_entropy_bits = 0.0;
  std::vector<std::string> provenance;
};

/// Per item: 10 x share of the largest semantic cluster; dataset score is the item mean.
TaggingStability cast_t(const TagRunSet& runs, const Clusterer& clusterer = LexicalClusterer());

/// Share of the C(n, 2) run pairs whose full assignments agree after trimming.
/// A pair with a missing cell on either side never agrees.
double match_ratio(const TagRunSet& runs);

/// Mean over items of the per-item tag entropy in bits.
double tag_entropy(const TagRunSet& runs);

/// Per-run percentage of items equal to gold (case-folded, trimmed); mean and std across runs.
stats::AggregateStat accuracy(const TagRunSet& runs);

Json to_json(const TaggingStability& t);

}  // namespace castbench

#endif  // CASTBENCH_TAGGING_METRICS_HPP_
