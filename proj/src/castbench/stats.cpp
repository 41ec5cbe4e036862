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

#include "castbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "castbench/error.hpp"
#include "castbench/rng.hpp"

namespace castbench {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kContractViolation: return "contract-violation";
    case ErrorCode::kInsufficientPairs: return "insufficient-pairs";
    case ErrorCode::kZeroVariance: return "zero-variance";
    case ErrorCode::kJudgeUnavailable: return "judge-unavailable";
    case ErrorCode::kMalformedOutput: return "malformed-output";
    case ErrorCode::kSchemaViolation: return "schema-violation";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kProviderError: return "provider-error";
    case ErrorCode::kRetriesExhausted: return "retries-exhausted";
    case ErrorCode::kInsufficientRuns: return "insufficient-runs";
    case ErrorCode::kNoGold: return "no-gold";
    case ErrorCode::kConfig: return "config-error";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

namespace stats {

void EmpiricalDistribution::add(const std::string& outcome, std::size_t count) {
  require(count >= 1, "outcome count must be at least 1");
  counts_[outcome] += count;
  total_ += count;
}

EmpiricalDistribution EmpiricalDistribution::from_outcomes(std::span<const std::string> outcomes) {
  EmpiricalDistribution d;
  for (const auto& o : outcomes) d.add(o);
  return d;
}

double kendall_tau(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  require(a.size() == b.size(), "kendall_tau: sequences differ in length");
  if (a.size() < 2) {
    throw Error(ErrorCode::kInsufficientPairs, "kendall_tau needs at least two matched positions");
  }
  require(std::set<std::size_t>(a.begin(), a.end()).size() == a.size() &&
              std::set<std::size_t>(b.begin(), b.end()).size() == b.size(),
          "kendall_tau: positions must be distinct within a sequence");
  const std::size_t m = a.size();
  long long concordant_minus_discordant = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool a_less = a[i] < a[j];
      const bool b_less = b[i] < b[j];
      concordant_minus_discordant += (a_less == b_less) ? 1 : -1;
    }
  }
  return static_cast<double>(concordant_minus_discordant) / static_cast<double>(pair_count(m));
}

double kendall_p_value(std::size_t m, double tau) {
  require(m >= 2, "kendall_p_value needs at least two elements");
  require(tau >= -1.0 - 1e-12 && tau <= 1.0 + 1e-12, "kendall_p_value: tau outside [-1, 1]");
  const std::size_t total_pairs = pair_count(m);
  // discordant = (1 - tau) / 2 * C(m, 2)
  const auto discordant =
      static_cast<std::size_t>(std::llround((1.0 - tau) * 0.5 * static_cast<double>(total_pairs)));
  const std::size_t tail = std::min(discordant, total_pairs - discordant);

  // Probability of k inversions in a uniform random permutation, built by
  // inserting elements one at a time.
  std::vector<long double> dist{1.0L};
  for (std::size_t k = 2; k <= m; ++k) {
    std::vector<long double> next(dist.size() + k - 1, 0.0L);
    for (std::size_t i = 0; i < dist.size(); ++i) {
      for (std::size_t j = 0; j < k; ++j) next[i + j] += dist[i] / static_cast<long double>(k);
    }
    dist = std::move(next);
  }
  long double cdf = 0.0L;
  for (std::size_t k = 0; k <= tail; ++k) cdf += dist[k];
  return static_cast<double>(std::min<long double>(1.0L, 2.0L * cdf));
}

double positional_score(double tau) {
  require(tau >= -1.0 - 1e-12 && tau <= 1.0 + 1e-12, "positional_score: tau outside [-1, 1]");
  return (std::clamp(tau, -1.0, 1.0) + 1.0) * 5.0;
}

double shannon_entropy(const EmpiricalDistribution& d) {
  require(d.total() >= 1, "shannon_entropy: empty distribution");
  const double total = static_cast<double>(d.total());
  double h = 0.0;
  for (const auto& [_, count] : d.counts()) {
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  return h <= 0.0 ? 0.0 : h;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size(), "pearson: sequences differ in length");
  require(xs.size() >= 3, "pearson: needs at least three points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kZeroVariance, "pearson: input sequence is constant");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Correlation pearson(std::span<const double> xs, std::span<const double> ys,
                    std::size_t permutations, std::uint64_t seed) {
  Correlation result;
  result.r = pearson_r(xs, ys);
  if (permutations == 0) return result;

  Rng rng(seed);
  std::vector<double> shuffled(ys.begin(), ys.end());
  const double observed = std::abs(result.r) - 1e-12;
  std::size_t at_least_as_extreme = 0;
  for (std::size_t i = 0; i < permutations; ++i) {
    rng.shuffle(std::span<double>(shuffled));
    if (std::abs(pearson_r(xs, shuffled)) >= observed) ++at_least_as_extreme;
  }
  result.p = static_cast<double>(at_least_as_extreme + 1) / static_cast<double>(permutations + 1);
  return result;
}

double majority_ratio(std::span<const std::size_t> cluster_sizes, std::size_t n) {
  require(n >= 1, "majority_ratio: n must be positive");
  require(!cluster_sizes.empty(), "majority_ratio: no clusters");
  std::size_t sum = 0;
  for (std::size_t s : cluster_sizes) {
    require(s >= 1, "majority_ratio: empty cluster");
    sum += s;
  }
  require(sum == n, "majority_ratio: cluster sizes do not sum to n");
  const std::size_t largest = *std::max_element(cluster_sizes.begin(), cluster_sizes.end());
  return static_cast<double>(largest) / static_cast<double>(n);
}

AggregateStat mean_std(std::span<const double> values) {
  require(!values.empty(), "mean_std: empty input");
  AggregateStat s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace stats
}  // namespace castbench
