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
//
// Independent re-coding of the evaluated constant chains, structured exactly
// like the source displays (plain gamma functions, per-n factors, literal
// order). Guards the production lgamma-based arrangement against
// transcription slips; agreement is required to 1e-12 relative.

#ifndef STABLEDP_TESTS_TRANSCRIPTION_HPP
#define STABLEDP_TESTS_TRANSCRIPTION_HPP

#include <cmath>

#include "stabledp/problems.hpp"

namespace stabledp::transcription {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline double chi_sq_moment(double p, int d) {
  return std::pow(2.0, p) * std::tgamma(p + d / 2.0) / std::tgamma(d / 2.0);
}

inline double abs_moment(double alpha, double p, int d) {
  return std::pow(2.0, p) * std::tgamma(1.0 - p / alpha) *
         std::tgamma((d + p) / 2.0) /
         (std::tgamma(1.0 - p / 2.0) * std::tgamma(d / 2.0));
}

inline double c_gamma_ref(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& c, int d, long n) {
  const double C1 = 2.0 * c.K2 * c.D * eta / (n * sigma);
  const double C2 = 2.0 / std::sqrt(kPi) * std::tgamma(1.0 + 1.0 / alpha);
  const double C3 =
      std::tgamma((1.0 + alpha - p) / alpha) / std::tgamma((3.0 - p) / 2.0);
  const double C4 = 2.0 * C1 * C2;
  const double C5 = 2.0 * C1 * C3;
  const double C6 =
      C4 * std::pow(1.0 - 2.0 * eta * c.m + eta * eta * c.K1 * c.K1, p / 2.0);
  const double C7 = C4 * (std::sqrt(2.0) + std::pow(2.0 * eta * c.K, p / 2.0)) +
                    C5 * std::sqrt(2.0) * std::pow(sigma, p) *
                        std::sqrt(chi_sq_moment(p, d));
  return n * (C6 + C7) * (2.0 + c.theta_star_norm);
}

inline double c_gamma_hat_ref(double p, double alpha, double sigma, double eta,
                              const RegularityConstants& c, int d, long n) {
  const double chat = (c.B + std::sqrt(c.B * c.B + 4.0 * c.m * c.K)) / (2.0 * c.m);
  const double C1 = 2.0 * c.K2 * c.D * eta / (n * sigma);
  const double C2 = 2.0 / std::sqrt(kPi) * std::tgamma(1.0 + 1.0 / alpha);
  const double C3 =
      std::tgamma((1.0 + alpha - p) / alpha) / std::tgamma((3.0 - p) / 2.0);
  const double C4 = 2.0 * C1 * C2;
  const double C5 = 2.0 * C1 * C3;
  const double C6 =
      C4 * std::pow(1.0 - 2.0 * eta * c.m + eta * eta * c.K1 * c.K1, p / 2.0);
  const double C7 = C4 + C4 * std::pow(2.0 * eta * c.K, p / 2.0) +
                    C5 * std::sqrt(2.0) * std::pow(sigma, p) *
                        std::sqrt(chi_sq_moment(p, d)) +
                    std::sqrt(2.0) * C4 * std::pow(chat, p);
  return n * (C6 + C7) * (2.0 + chat);
}

inline double H_large_ref(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& c, int d) {
  const double sC = alpha * std::pow(2.0, alpha) * std::tgamma((d + alpha) / 2.0) /
                    (std::tgamma(1.0 - alpha / 2.0) * std::tgamma(d / 2.0));
  const double B1 = std::pow(sigma, alpha) / eta * (sC * p / (alpha - 1.0)) *
                    std::pow(4.0 / (c.m * p), p - 1.0);
  const double C1s =
      eta * std::pow(B1, p) / p +
      sC * std::pow(sigma, alpha) *
          (p * (std::sqrt(static_cast<double>(d)) + 2.0) / (2.0 - alpha) +
           p * std::pow(2.0 * eta * c.K, (p - 1.0) / 2.0) / (alpha - 1.0) +
           1.0 / (alpha - p)) +
      sC * p / (alpha - 1.0) * std::pow(2.0, p - 1.0) * alpha *
          std::pow(sigma, alpha + p - 1.0) / (alpha + p - 1.0) *
          std::tgamma(1.0 - (p - 1.0) / alpha) * std::tgamma((d + p - 1.0) / 2.0) /
          (std::tgamma(1.0 - (p - 1.0) / 2.0) * std::tgamma(d / 2.0));
  return eta * (p * (c.m / 2.0 + c.K) + c.m * std::pow(2.0 * c.K, p / 2.0)) + C1s;
}

inline double H_small_ref(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& c, int d) {
  return 1.0 + std::pow(2.0 * eta * c.K, p / 2.0) +
         std::pow(sigma, p) * abs_moment(alpha, p, d);
}

inline RegularityConstants sample_constants(RngStream& rng) {
  RegularityConstants c;
  c.m = 0.05 + 1.95 * rng.next_double();
  c.K1 = c.m + 2.0 * rng.next_double();
  c.K2 = 0.1 + 3.0 * rng.next_double();
  c.B = 0.1 + 2.0 * rng.next_double();
  c.K = rng.next_double() < 0.3 ? 0.0 : 2.0 * rng.next_double();
  c.D = rng.next_double() < 0.1 ? 0.0 : 5.0 * rng.next_double();
  c.theta_star_norm = 2.0 * rng.next_double();
  return c;
}

}  // namespace stabledp::transcription

#endif  // STABLEDP_TESTS_TRANSCRIPTION_HPP
