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

#ifndef STABLEDP_AUDIT_HPP
#define STABLEDP_AUDIT_HPP

#include <string>
#include <vector>

namespace stabledp {

// Machine-readable outcome of one empirical audit. `worst_margin` is the
// smallest (bound - estimate) observed over all checked points; `ci_width`
// is the statistical allowance at that same point (0 for deterministic
// audits). The audit passes iff worst_margin >= -ci_width.
struct AuditReport {
  std::string name;
  long checked_points = 0;
  double worst_margin = 0.0;
  double ci_width = 0.0;
  bool pass = false;

  static AuditReport from_margins(std::string name, long checked_points,
                                  double worst_margin, double ci_width) {
    AuditReport r;
    r.name = std::move(name);
    r.checked_points = checked_points;
    r.worst_margin = worst_margin;
    r.ci_width = ci_width;
    r.pass = worst_margin >= -ci_width;
    return r;
  }
};

std::string to_csv_header();
std::string to_csv_row(const AuditReport& report);
std::string to_summary_line(const AuditReport& report);

}  // namespace stabledp

#endif  // STABLEDP_AUDIT_HPP
