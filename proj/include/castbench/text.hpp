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

#ifndef CASTBENCH_TEXT_HPP_
#define CASTBENCH_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace castbench::text {

std::string trim(std::string_view s);

// NFKC + case fold, with runs of whitespace collapsed to one ASCII space and
// the ends trimmed. Invalid UTF-8 is passed through byte-wise lower-cased.
std::string normalize(std::string_view s);

// Normalized word tokens: maximal runs of letters/digits, except that each
// ideographic or kana code point forms its own token.
std::vector<std::string> tokens(std::string_view s);

// |A n B| / |A u B| over token sets; both empty gives 1, one empty gives 0.
double token_jaccard(std::string_view a, std::string_view b);

std::size_t word_count(std::string_view s);

std::string sha256_hex(std::string_view data);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace castbench::text

#endif  // CASTBENCH_TEXT_HPP_
