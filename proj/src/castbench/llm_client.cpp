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

#include "castbench/llm_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "castbench/error.hpp"

namespace castbench {

CompletionResult complete(const PromptSpec& prompt, const DecodeParams& params, Provider& provider,
                          std::size_t sample_index) {
  return provider.complete(prompt, params, sample_index);
}

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait_s = (1.0 - tokens_) / rate_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    lock.lock();
  }
}

namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string path_prefix;
};

Endpoint split_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, fmt::format("base_url '{}' lacks a scheme", base_url));
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  Endpoint e;
  e.scheme_host_port = base_url.substr(0, path_start);
  e.path_prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
  return e;
}

}  // namespace

HttpProvider::HttpProvider(ProviderConfig config, RetryPolicy retry, Sleeper sleeper)
    : config_(std::move(config)), retry_(retry), sleeper_(std::move(sleeper)) {
  require(retry_.max_attempts >= 1, "HttpProvider: max_attempts must be positive");
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (config_.requests_per_minute > 0.0) {
    bucket_ = std::make_unique<TokenBucket>(config_.requests_per_minute / 60.0, 1.0);
  }
  split_url(config_.base_url);
}

Json HttpProvider::build_request_body(const PromptSpec& prompt, const DecodeParams& params,
                                      const std::string& model) {
  Json body;
  body["model"] = model;
  body["messages"] = Json::array({Json{{"role", "user"}, {"content", prompt.rendered_text}}});
  body["temperature"] = params.temperature;
  body["seed"] = params.seed;
  if (params.max_tokens) body["max_tokens"] = *params.max_tokens;
  return body;
}

std::string HttpProvider::parse_response_body(std::string_view body) {
  const Json doc = Json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kProviderError, "response body is not JSON");
  try {
    const Json& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorCode::kProviderError, "message content is not text");
    return content.get<std::string>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::kProviderError, "response lacks choices[0].message.content");
  }
}

CompletionResult HttpProvider::complete(const PromptSpec& prompt, const DecodeParams& params,
                                        std::size_t /*sample_index*/) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(params.timeout_s));
  const Endpoint endpoint = split_url(config_.base_url);

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorCode::kConfig,
                  fmt::format("environment variable '{}' is not set", config_.api_key_env));
    }
    const std::string value = config_.auth_scheme.empty() ? std::string(key)
                                                          : config_.auth_scheme + " " + key;
    headers.emplace(config_.auth_header, value);
  }
  const std::string body = build_request_body(prompt, params, config_.model).dump();
  const std::string path = endpoint.path_prefix + "/chat/completions";

  std::string last_error;
  for (std::size_t attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    const auto remaining = std::chrono::duration<double>(deadline - Clock::now()).count();
    if (remaining <= 0.0) {
      throw Error(ErrorCode::kTimeout,
                  fmt::format("no response within {:.1f} s ({})", params.timeout_s, last_error));
    }
    if (bucket_) bucket_->acquire();

    httplib::Client client(endpoint.scheme_host_port);
    const auto usec = static_cast<long long>(remaining * 1e6);
    client.set_connection_timeout(std::chrono::microseconds(usec));
    client.set_read_timeout(std::chrono::microseconds(usec));
    client.set_write_timeout(std::chrono::microseconds(usec));
    auto res = client.Post(path, headers, body, "application/json");

    bool retryable = false;
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      retryable = true;
    } else if (res->status >= 200 && res->status < 300) {
      CompletionResult out;
      out.text = parse_response_body(res->body);
      out.latency_s = std::chrono::duration<double>(Clock::now() - start).count();
      out.provider = config_.id;
      out.attempt_count = attempt;
      return out;
    } else if (res->status == 429 || res->status >= 500) {
      last_error = fmt::format("HTTP {}", res->status);
      retryable = true;
    } else {
      throw Error(ErrorCode::kProviderError,
                  fmt::format("HTTP {} from {}: {}", res->status, config_.id,
                              res->body.substr(0, 200)));
    }

    if (retryable && attempt < retry_.max_attempts) {
      const auto backoff = retry_.base_backoff * (1LL << (attempt - 1));
      if (Clock::now() + backoff >= deadline) {
        throw Error(ErrorCode::kTimeout,
                    fmt::format("no response within {:.1f} s ({})", params.timeout_s, last_error));
      }
      sleeper_(backoff);
    }
  }
  if (Clock::now() >= deadline) {
    throw Error(ErrorCode::kTimeout,
                fmt::format("no response within {:.1f} s ({})", params.timeout_s, last_error));
  }
  throw Error(ErrorCode::kRetriesExhausted,
              fmt::format("{} attempts failed; last error: {}", retry_.max_attempts, last_error));
}

}  // namespace castbench
