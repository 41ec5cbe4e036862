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

#ifndef CASTBENCH_ASSETS_HPP_
#define CASTBENCH_ASSETS_HPP_

#include <map>
#include <string>
#include <string_view>

#include "castbench/error.hpp"

namespace castbench::assets {

/// Files under assets/, embedded at build time, keyed by relative path.
const std::map<std::string, std::string_view>& all();

inline std::string_view get(const std::string& name) {
  const auto& table = all();
  const auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorCode::kIo, "unknown embedded asset: " + name);
  return it->second;
}

}  // namespace castbench::assets

#endif  // CASTBENCH_ASSETS_HPP_
