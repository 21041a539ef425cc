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

#include "stabledp/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace stabledp {

namespace {

// The full key schema; anything else in a config file is an error.
const std::array<const char*, 40> kKnownKeys = {
    "model.kind",          "model.lambda",        "model.radius",
    "model.dim",           "dataset.source",      "dataset.n",
    "dataset.seed",        "dataset.path",        "chain.eta",
    "chain.sigma",         "chain.alpha",         "chain.batch",
    "chain.iters",         "chain.seed",          "chain.init",
    "chain.record_stride", "accountant.p",        "accountant.c",
    "accountant.rho",      "accountant.assumption3",
    "accountant.k",        "accountant.algorithm",
    "sample.n_draws",      "verifier.grid_points",
    "verifier.grid_radius_factor",                "verifier.replicas",
    "verifier.reps",       "verifier.bins",       "verifier.tv_replicas",
    "verifier.tv_n_list",  "verifier.tv_k_list",  "verifier.suites",
    "sweep.n_list",        "sweep.d_list",        "output.dir",
    "output.threads",      "verifier.seed",       "sweep.sigma",
    "sweep.eta",           "sweep.m",
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool known_key(const std::string& key) {
  return std::find_if(kKnownKeys.begin(), kKnownKeys.end(), [&](const char* k) {
           return key == k;
         }) != kKnownKeys.end();
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

Config Config::from_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    }
    const std::string dotted = section + "." + key;
    if (!known_key(dotted)) throw ConfigError("unknown config key: " + dotted);
    if (cfg.values_.count(dotted) != 0) throw ConfigError("duplicate config key: " + dotted);
    cfg.values_[dotted] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key: " + key);
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: `" + raw + "`");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_long(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t used = 0;
    const long v = std::stol(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not an integer: `" + raw + "`");
  }
}

long Config::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = get_string(key);
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not an unsigned integer: `" + raw + "`");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = get_string(key);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("config key " + key + ": not a boolean: `" + raw + "`");
}

std::vector<long> Config::get_long_list(const std::string& key,
                                        const std::vector<long>& fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = get_string(key);
  std::vector<long> out;
  std::istringstream in(raw);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) throw ConfigError("config key " + key + ": empty list element");
    try {
      std::size_t used = 0;
      out.push_back(std::stol(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": bad list element `" + cell + "`");
    }
  }
  if (out.empty()) throw ConfigError("config key " + key + ": empty list");
  return out;
}

void Config::override_value(const std::string& dotted_key, const std::string& value) {
  if (!known_key(dotted_key)) throw ConfigError("unknown config key: " + dotted_key);
  values_[dotted_key] = value;
}

std::string Config::canonical_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : values_) out << k << "=" << v << "\n";
  return out.str();
}

}  // namespace stabledp
