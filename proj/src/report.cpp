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

#include "stabledp/report.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace stabledp {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const std::string& canonical_text) {
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(canonical_text);
  return out.str();
}

CsvWriter::CsvWriter(const std::string& path, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  out_ << "# config_hash=" << config_hash << " version=" << kToolVersion << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out_ << (i ? "," : "") << columns[i];
  }
  out_ << "\n";
  out_.precision(17);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) {
    throw std::invalid_argument("CsvWriter: column count mismatch");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    out_ << (i ? "," : "") << values[i];
  }
  out_ << "\n";
}

void CsvWriter::raw_row(const std::string& line) { out_ << line << "\n"; }

void write_key_values(const std::string& path, const std::string& config_hash,
                      const std::vector<std::pair<std::string, double>>& items) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_key_values: cannot open " + path);
  out << "# config_hash=" << config_hash << " version=" << kToolVersion << "\n";
  out.precision(17);
  for (const auto& [name, value] : items) {
    out << name << " = " << value << "\n";
  }
}

}  // namespace stabledp
