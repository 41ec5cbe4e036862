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

#ifndef CASTBENCH_PERSISTENCE_HPP_
#define CASTBENCH_PERSISTENCE_HPP_

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "castbench/types.hpp"

namespace castbench {

/// Compact single-line form used for every JSONL record.
std::string to_line(const Json& record);

/// Append-only JSONL writer; write() is safe to call from several threads.
class JsonlWriter {
 public:
  /// truncate=true starts a fresh file.
  JsonlWriter(const std::filesystem::path& path, bool truncate);
  void write(const Json& record);
  void flush();

 private:
  std::mutex mu_;
  std::ofstream out_;
  std::filesystem::path path_;
};

/// Throws kIo if the file is missing or a line is not JSON.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary file and a rename.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace castbench

#endif  // CASTBENCH_PERSISTENCE_HPP_
