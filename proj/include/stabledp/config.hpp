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

#ifndef STABLEDP_CONFIG_HPP
#define STABLEDP_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabledp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat sectioned key-value text (INI-like). `#` and `;` start comments.
// Unknown sections or keys are rejected at load time, values are range
// checked by the typed getters.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text);

  bool has(const std::string& dotted_key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long> get_long_list(const std::string& key,
                                  const std::vector<long>& fallback) const;

  void override_value(const std::string& dotted_key, const std::string& value);

  // Sorted `section.key=value` lines; the provenance hash is taken over this.
  std::string canonical_text() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace stabledp

#endif  // STABLEDP_CONFIG_HPP
