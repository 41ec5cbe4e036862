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

#ifndef CASTBENCH_CONFIG_HPP_
#define CASTBENCH_CONFIG_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "castbench/llm_client.hpp"
#include "castbench/matcher.hpp"
#include "castbench/mock_provider.hpp"
#include "castbench/types.hpp"

namespace castbench {

struct DatasetConfig {
  std::string id;
  std::filesystem::path path;
  std::string column_name;
  std::optional<std::string> gold_column;
  std::optional<std::string> id_column;
  std::string language = "en_US";
};

struct QueryConfig {
  std::string text;
  std::optional<std::string> language;  // falls back to the dataset language
  Task task = Task::kSummarize;
  std::optional<TaggingMode> mode;
};

struct MockSection {
  MockConfig config;
  std::map<std::string, MockScenario> scenario_by_method;
  std::optional<std::filesystem::path> answer_bank;
  std::optional<std::filesystem::path> synonyms;
};

struct ExperimentConfig {
  std::filesystem::path output_root = "castbench_runs";
  std::vector<DatasetConfig> datasets;
  std::vector<QueryConfig> queries;
  std::vector<std::string> methods = {"cast"};
  std::size_t n_runs = 10;
  double alpha = 0.9;
  std::size_t self_consistency_k = 3;
  DecodeParams decode;
  std::string provider = "mock";
  std::vector<ProviderConfig> providers;
  std::optional<MockSection> mock;
  std::vector<std::string> judges = {"lexical"};
  std::string clusterer = "lexical";
  MatchOptions match;
  std::optional<std::filesystem::path> fewshot_examples;
  std::size_t parallelism = 1;
  bool llm_refine = false;

  /// Throws kConfig on invalid values (files are checked by load_dataset).
  void validate() const;
};

/// Parses config text; relative paths resolve against base_dir. Syntax errors
/// report line and column.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Dataset {
  std::string id;
  std::string column_name;
  std::string language;
  std::vector<std::string> item_ids;
  std::vector<std::string> items;
  std::vector<std::optional<std::string>> gold;
};

/// CSV (.csv) or JSON Lines (.jsonl, .ndjson); the text column is chosen by name.
Dataset load_dataset(const DatasetConfig& cfg);

/// RFC 4180 rows; quoted fields may span lines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace castbench

#endif  // CASTBENCH_CONFIG_HPP_
