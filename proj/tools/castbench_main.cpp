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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "castbench/commands.hpp"
#include "castbench/error.hpp"

namespace {

template <typename T>
std::optional<T> if_set(const CLI::Option* opt, const T& value) {
  return opt->count() > 0 ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace castbench;
  CLI::App app{"castbench: run-to-run stability benchmark for LLM summarization and tagging"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  double alpha = kDefaultAlpha;
  std::size_t n_runs = 10;
  std::vector<std::string> methods;
  std::string provider;
  std::size_t parallelism = 1;

  auto* run = app.add_subcommand("run", "Run every dataset x query x method cell of a config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* run_out = run->add_option("--out", out, "Output root (overrides the config)");
  auto* run_alpha = run->add_option("--alpha", alpha, "CAST-S semantic weight")->check(CLI::Range(0.0, 1.0));
  auto* run_n = run->add_option("--n-runs", n_runs, "Runs per experiment")->check(CLI::PositiveNumber);
  run->add_option("--method", methods, "Method(s) to run (repeatable)");
  auto* run_provider = run->add_option("--provider", provider, "Provider id");
  auto* run_par = run->add_option("--parallelism", parallelism, "Concurrent requests")->check(CLI::PositiveNumber);

  std::string experiment_dir;
  auto* score = app.add_subcommand("score", "Rescore a persisted experiment");
  score->add_option("dir", experiment_dir, "Experiment directory")->required();
  auto* score_alpha = score->add_option("--alpha", alpha, "CAST-S semantic weight")->check(CLI::Range(0.0, 1.0));
  auto* score_par = score->add_option("--parallelism", parallelism, "Matcher threads")->check(CLI::PositiveNumber);
  auto* score_config = score->add_option("--config", config_path, "Config naming LLM judges and providers");

  std::string scores_file;
  std::string human_file;
  auto* validate = app.add_subcommand("validate-metric", "Pearson correlation of metric scores with human ratings");
  validate->add_option("scores", scores_file, "CSV with pair_id and one column per metric")->required();
  validate->add_option("human", human_file, "CSV with pair_id and rating (1-5)")->required();
  auto* validate_out = validate->add_option("--out", out, "Write results as JSON");

  std::string root;
  std::string format = "markdown";
  auto* report = app.add_subcommand("report", "Render tables for every scored experiment under a root");
  report->add_option("root", root, "Output root")->required();
  report->add_option("--format", format, "markdown or csv")->check(CLI::IsMember({"markdown", "csv"}));

  MockStudyOptions demo;
  std::string demo_out = demo.out.string();
  auto* mock = app.add_subcommand("mock-demo", "Four-scenario mock study, fully offline");
  mock->add_option("--out", demo_out, "Output root")->capture_default_str();
  mock->add_option("--n-runs", demo.n_runs, "Runs per scenario")->capture_default_str()->check(CLI::Range(2, 1000));
  mock->add_option("--seed", demo.seed, "Mock seed")->capture_default_str();
  mock->add_option("--p-reorder", demo.p_reorder, "Reorder probability for the non-CAST scenarios")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  mock->add_option("--parallelism", demo.parallelism, "Concurrent requests")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) {
      RunOverrides o;
      if (run_out->count() > 0) o.out = out;
      o.alpha = if_set(run_alpha, alpha);
      o.n_runs = if_set(run_n, n_runs);
      o.methods = methods;
      o.provider = if_set(run_provider, provider);
      o.parallelism = if_set(run_par, parallelism);
      return cmd_run(config_path, o, std::cout);
    }
    if (score->parsed()) {
      std::optional<std::filesystem::path> cfg;
      if (score_config->count() > 0) cfg = config_path;
      return cmd_score(experiment_dir, if_set(score_alpha, alpha), if_set(score_par, parallelism), std::cout, cfg);
    }
    if (validate->parsed()) {
      std::optional<std::filesystem::path> dest;
      if (validate_out->count() > 0) dest = out;
      return cmd_validate_metric(scores_file, human_file, dest, std::cout);
    }
    if (report->parsed()) {
      return cmd_report(root, format == "csv" ? ReportFormat::kCsv : ReportFormat::kMarkdown, std::cout);
    }
    if (mock->parsed()) {
      demo.out = demo_out;
      return cmd_mock_demo(demo, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
