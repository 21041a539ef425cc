// Copyright 2026 The stabledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STABLEDP_REPORT_HPP
#define STABLEDP_REPORT_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace stabledp {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over the canonical config text; embedded in every output so files
// can be traced back to the exact configuration that produced them.
std::uint64_t fnv1a64(const std::string& text);
std::string config_hash_hex(const std::string& canonical_text);

// CSV file whose first line is `# config_hash=<hex> version=<v>`.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_hash,
            const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

// Flat `name = value` report with the same provenance comment.
void write_key_values(const std::string& path, const std::string& config_hash,
                      const std::vector<std::pair<std::string, double>>& items);

}  // namespace stabledp

#endif  // STABLEDP_REPORT_HPP
