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

#ifndef CASTBENCH_STATS_HPP_
#define CASTBENCH_STATS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace castbench::stats {

using IndexSequence = std::vector<std::size_t>;

/// Outcome counts keyed by an opaque canonical string.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  void add(const std::string& outcome, std::size_t count = 1);

  std::size_t total() const { return total_; }
  std::size_t outcomes() const { return counts_.size(); }
  const std::map<std::string, std::size_t>& counts() const { return counts_; }

  static EmpiricalDistribution from_outcomes(std::span<const std::string> outcomes);

 private:
  std::map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

struct AggregateStat {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

struct Correlation {
  double r = 0.0;
  double p = 1.0;
};

/// Kendall's tau-a between two equal-length sequences of distinct values.
/// Throws kContractViolation on length mismatch and kInsufficientPairs when
/// fewer than two elements are given.
double kendall_tau(std::span<const std::size_t> a, std::span<const std::size_t> b);

/// Exact two-sided p-value for tau-a under the null of independent random
/// orderings, from the distribution of discordant-pair counts over all m!
/// permutations.
double kendall_p_value(std::size_t m, double tau);

/// Maps tau from [-1, 1] onto [0, 10].
double positional_score(double tau);

/// Shannon entropy in bits.
double shannon_entropy(const EmpiricalDistribution& d);

inline constexpr std::size_t kDefaultPermutations = 10000;
inline constexpr std::uint64_t kDefaultPermutationSeed = 42;

/// Sample Pearson r with a seeded two-sided permutation p-value.
Correlation pearson(std::span<const double> xs, std::span<const double> ys,
                    std::size_t permutations = kDefaultPermutations,
                    std::uint64_t seed = kDefaultPermutationSeed);

/// Sample Pearson coefficient only.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

double majority_ratio(std::span<const std::size_t> cluster_sizes, std::size_t n);

/// Mean and sample standard deviation (n - 1 denominator, 0 for n = 1).
AggregateStat mean_std(std::span<const double> values);

std::size_t pair_count(std::size_t n);

}  // namespace castbench::stats

#endif  // CASTBENCH_STATS_HPP_
