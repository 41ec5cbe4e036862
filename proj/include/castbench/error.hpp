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

#ifndef CASTBENCH_ERROR_HPP_
#define CASTBENCH_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace castbench {

enum class ErrorCode {
  kContractViolation,
  kInsufficientPairs,
  kZeroVariance,
  kJudgeUnavailable,
  kMalformedOutput,
  kSchemaViolation,
  kTimeout,
  kProviderError,
  kRetriesExhausted,
  kInsufficientRuns,
  kNoGold,
  kConfig,
  kIo,
};

/// Stable kebab-case name used in persisted records and CLI messages.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void contract_violation(const std::string& what) {
  throw Error(ErrorCode::kContractViolation, what);
}

inline void require(bool condition, const char* what) {
  if (!condition) contract_violation(what);
}

}  // namespace castbench

#endif  // CASTBENCH_ERROR_HPP_
