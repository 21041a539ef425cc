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

#include "stabledp/audit.hpp"

#include <sstream>

namespace stabledp {

std::string to_csv_header() { return "name,checked_points,worst_margin,ci_width,pass"; }

std::string to_csv_row(const AuditReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << report.name << ',' << report.checked_points << ',' << report.worst_margin
      << ',' << report.ci_width << ',' << (report.pass ? 1 : 0);
  return out.str();
}

std::string to_summary_line(const AuditReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << (report.pass ? "PASS " : "FAIL ") << report.name << " (points="
      << report.checked_points << ", worst_margin=" << report.worst_margin
      << ", ci_width=" << report.ci_width << ")";
  return out.str();
}

}  // namespace stabledp
