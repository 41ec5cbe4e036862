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

#ifndef CASTBENCH_LLM_CLIENT_HPP_
#define CASTBENCH_LLM_CLIENT_HPP_

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "castbench/types.hpp"

namespace castbench {

/// A completion backend. sample_index distinguishes repeated draws of the same
/// prompt; live providers ignore it, the mock uses it to seed perturbations.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string id() const = 0;
  virtual CompletionResult complete(const PromptSpec& prompt, const DecodeParams& params,
                                    std::size_t sample_index) = 0;
};

CompletionResult complete(const PromptSpec& prompt, const DecodeParams& params, Provider& provider,
                          std::size_t sample_index = 0);

struct ProviderConfig {
  std::string id;
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model;
  std::string api_key_env;  // name of the environment variable, never the key
  std::string auth_header = "Authorization";
  std::string auth_scheme = "Bearer";
  double requests_per_minute = 0.0;  // 0 disables rate limiting
};

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds base_backoff{1000};  // doubles per retry: 1 s, 2 s, 4 s
};

/// Blocking token bucket; rate 0 means unlimited.
class TokenBucket {
 public:
  TokenBucket(double tokens_per_second, double burst);
  void acquire();

 private:
  std::mutex mu_;
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// OpenAI-compatible chat-completions client.
class HttpProvider final : public Provider {
 public:
  explicit HttpProvider(ProviderConfig config, RetryPolicy retry = {}, Sleeper sleeper = {});

  std::string id() const override { return config_.id; }
  CompletionResult complete(const PromptSpec& prompt, const DecodeParams& params,
                            std::size_t sample_index) override;

  static Json build_request_body(const PromptSpec& prompt, const DecodeParams& params,
                                 const std::string& model);
  /// Extracts choices[0].message.content; throws kProviderError otherwise.
  static std::string parse_response_body(std::string_view body);

 private:
  ProviderConfig config_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  std::unique_ptr<TokenBucket> bucket_;
};

}  // namespace castbench

#endif  // CASTBENCH_LLM_CLIENT_HPP_
