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

#ifndef STABLEDP_SPECIAL_HPP
#define STABLEDP_SPECIAL_HPP

#include <cmath>
#include <stdexcept>

namespace stabledp {

// log Gamma(x) for x > 0, reentrant (does not touch the global signgam).
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
#if defined(__unix__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Gamma(a)/Gamma(b) evaluated as exp(lgamma(a) - lgamma(b)) so that ratios
// like Gamma((d+alpha)/2)/Gamma(d/2) stay finite out to d ~ 1e4.
inline double gamma_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("gamma_ratio: arguments must be positive");
  }
  return std::exp(log_gamma(a) - log_gamma(b));
}

}  // namespace stabledp

#endif  // STABLEDP_SPECIAL_HPP
