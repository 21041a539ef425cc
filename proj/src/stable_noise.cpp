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

#include "stabledp/stable_noise.hpp"

#include <cmath>
#include <stdexcept>

#include "stabledp/special.hpp"

namespace stabledp {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

void StableSpec::validate() const {
  if (!(alpha > 1.0) || !(alpha <= 2.0)) {
    throw std::domain_error("StableSpec: alpha must lie in (1, 2]");
  }
  if (!(sigma > 0.0)) throw std::domain_error("StableSpec: sigma must be positive");
  if (dim < 1) throw std::domain_error("StableSpec: dim must be >= 1");
}

double sample_subordinator(double alpha, RngStream& rng) {
  if (!(alpha > 1.0) || !(alpha < 2.0)) {
    throw std::domain_error(
        "sample_subordinator: alpha must lie in (1, 2); the Gaussian endpoint "
        "is degenerate (lambda == 1)");
  }
  const double a = alpha / 2.0;  // one-sided stable index, in (1/2, 1)
  // Angle measured from the right endpoint so sin(v) never cancels.
  const double v = kPi * rng.next_open();
  const double w = rng.next_exponential();
  const double amp = std::sin(a * (kPi - v)) *
                     std::pow(std::sin(a * kPi + (1.0 - a) * v), (1.0 - a) / a) /
                     std::pow(std::sin(v), 1.0 / a);
  return amp * std::pow(w, -(1.0 - a) / a);
}

SubordinatedDraw sample_subordinated(const StableSpec& spec, RngStream& rng) {
  spec.validate();
  SubordinatedDraw draw;
  if (spec.alpha == 2.0) {
    draw.lambda = 1.0;
  } else {
    // Keyed by a consumed nonce so repeated calls on one stream get fresh
    // mixing draws (derive alone is a pure function of the stream key).
    RngStream sub = rng.derive(Stream::kSubordinator).derive(rng.next_u64());
    draw.lambda = sample_subordinator(spec.alpha, sub);
  }
  draw.gauss.resize(spec.dim);
  for (int i = 0; i < spec.dim; ++i) draw.gauss[i] = rng.next_gaussian();
  draw.xi = std::sqrt(2.0 * draw.lambda) * draw.gauss;
  return draw;
}

Vec sample_stable_vector(const StableSpec& spec, RngStream& rng) {
  return sample_subordinated(spec, rng).xi;
}

double stable_abs_moment(double alpha, double p, int dim) {
  if (!(alpha > 1.0) || !(alpha <= 2.0)) {
    throw std::domain_error("stable_abs_moment: alpha must lie in (1, 2]");
  }
  if (dim < 1) throw std::domain_error("stable_abs_moment: dim must be >= 1");
  if (p < 0.0) throw std::domain_error("stable_abs_moment: p must be >= 0");
  if (p >= alpha) {
    throw std::domain_error(
        "stable_abs_moment: divergent moment, fractional moments are finite "
        "only for p < alpha");
  }
  if (p == 0.0) return 1.0;
  const double d = static_cast<double>(dim);
  return std::exp(p * std::log(2.0) + log_gamma(1.0 - p / alpha) +
                  log_gamma((d + p) / 2.0) - log_gamma(1.0 - p / 2.0) -
                  log_gamma(d / 2.0));
}

double subordinator_neg_half_moment(double alpha) {
  if (!(alpha > 1.0) || !(alpha <= 2.0)) {
    throw std::domain_error("subordinator_neg_half_moment: alpha must lie in (1, 2]");
  }
  return 2.0 / std::sqrt(kPi) * std::exp(log_gamma(1.0 + 1.0 / alpha));
}

double subordinator_power_moment(double alpha, double p) {
  if (!(alpha > 1.0) || !(alpha < 2.0)) {
    throw std::domain_error("subordinator_power_moment: alpha must lie in (1, 2)");
  }
  if (!(p > 0.0) || !(p <= 1.0)) {
    throw std::domain_error("subordinator_power_moment: p must lie in (0, 1]");
  }
  return std::exp(log_gamma((1.0 + alpha - p) / alpha) -
                  log_gamma((3.0 - p) / 2.0));
}

}  // namespace stabledp
