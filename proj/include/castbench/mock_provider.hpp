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

#ifndef CASTBENCH_MOCK_PROVIDER_HPP_
#define CASTBENCH_MOCK_PROVIDER_HPP_

#include <memory>
#include <string>

#include "castbench/llm_client.hpp"
#include "castbench/types.hpp"

namespace castbench {

/// Generation regimes the mock can imitate, from free-form intermediate
/// reasoning to fully committed CAST-style intermediate states.
enum class MockScenario { kUnconstrained, kRelevantIntermediate, kIrrelevantIntermediate, kCastLike };

std::string_view to_string(MockScenario s);
MockScenario parse_mock_scenario(std::string_view s);

struct MockConfig {
  std::uint64_t seed = 42;
  double p_reorder = 0.0;
  double p_paraphrase = 0.0;
  double p_topic_jitter = 0.0;
  double p_malformed = 0.0;
  MockScenario scenario = MockScenario::kCastLike;

  void validate() const;
};

/// Canned answers keyed by "<dataset>|<normalized query>" plus a synonym
/// table for paraphrasing. Versioned with the repo.
struct MockFixtures {
  Json answer_bank;
  Json synonyms;
  std::string version;

  static std::shared_ptr<const MockFixtures> builtin();
  static std::shared_ptr<const MockFixtures> from_json(const Json& answer_bank, const Json& synonyms);
};

/// Deterministic structured response for the prompt. A pure function of
/// (prompt, cfg, run_index, fixtures).
std::string mock_generate(const PromptSpec& prompt, const MockConfig& cfg, std::size_t run_index,
                          const MockFixtures& fixtures = *MockFixtures::builtin());

/// Simulated wall-clock seconds for a mock call; positive and deterministic.
double mock_latency(const PromptSpec& prompt, const MockConfig& cfg, std::size_t run_index,
                    std::string_view response);

class MockProvider final : public Provider {
 public:
  explicit MockProvider(MockConfig cfg,
                        std::shared_ptr<const MockFixtures> fixtures = MockFixtures::builtin(),
                        std::string id = "mock");

  std::string id() const override { return id_; }
  CompletionResult complete(const PromptSpec& prompt, const DecodeParams& params,
                            std::size_t sample_index) override;
  const MockConfig& config() const { return cfg_; }

 private:
  MockConfig cfg_;
  std::shared_ptr<const MockFixtures> fixtures_;
  std::string id_;
};

}  // namespace castbench

#endif  // CASTBENCH_MOCK_PROVIDER_HPP_
