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

#ifndef CASTBENCH_COMMANDS_HPP_
#define CASTBENCH_COMMANDS_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "castbench/config.hpp"
#include "castbench/pipeline.hpp"

namespace castbench {

/// Process exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDegenerate = 1;
inline constexpr int kExitConfigError = 2;

struct RunOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<double> alpha;
  std::optional<std::size_t> n_runs;
  std::vector<std::string> methods;
  std::optional<std::string> provider;
  std::optional<std::size_t> parallelism;
};

/// Provider for a method: the mock (with any per-method scenario) or a live endpoint.
std::shared_ptr<Provider> make_provider(const ExperimentConfig& cfg, const std::string& id,
                                        const std::string& method);

/// Judges named in the config, each memoized in cache.
JudgeSet make_judges(const ExperimentConfig* cfg, const std::vector<std::string>& names,
                     const std::shared_ptr<JudgeCache>& cache);

/// Runs every (dataset, query, method) cell. Returns 1 if any experiment is degenerate.
int cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& log);

/// Rescores persisted runs of one experiment directory.
int cmd_score(const std::filesystem::path& experiment_dir, std::optional<double> alpha,
              std::optional<std::size_t> parallelism, std::ostream& log,
              const std::optional<std::filesystem::path>& config_path = std::nullopt);

struct MetricCorrelation {
  std::string metric;
  std::size_t n = 0;
  double r = 0.0;
  double p = 1.0;
};

/// Both files are CSV keyed by a pair_id column. Human ratings (1-5, column
/// "rating") are doubled onto the 0-10 scale; every other score column is a metric.
std::vector<MetricCorrelation> validate_metric(const std::filesystem::path& scores,
                                               const std::filesystem::path& human);

int cmd_validate_metric(const std::filesystem::path& scores, const std::filesystem::path& human,
                        const std::optional<std::filesystem::path>& out, std::ostream& log);

/// Renders report.md or report.csv plus word_counts.csv under the output root.
int cmd_report(const std::filesystem::path& root, ReportFormat format, std::ostream& log);

struct MockStudyOptions {
  std::filesystem::path out = "castbench_mock_demo";
  std::uint64_t seed = 42;
  std::size_t n_runs = 10;
  double p_reorder = 0.5;
  std::size_t parallelism = 1;
};

struct MockStudyCell {
  MockScenario scenario;
  Variant variant;
};

/// Scenario to prompt pairing used by the four-condition study.
const std::vector<MockStudyCell>& mock_study_cells();

/// Runs the four scenarios on the shipped corpus and writes a report.
int cmd_mock_demo(const MockStudyOptions& options, std::ostream& log);

}  // namespace castbench

#endif  // CASTBENCH_COMMANDS_HPP_
