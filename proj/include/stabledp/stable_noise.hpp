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

#ifndef STABLEDP_STABLE_NOISE_HPP
#define STABLEDP_STABLE_NOISE_HPP

#include <Eigen/Core>

#include "stabledp/rng.hpp"

namespace stabledp {

using Vec = Eigen::VectorXd;

// Parameters of the rotationally invariant alpha-stable noise law with
// characteristic function exp(-||u||^alpha). `sigma` is the scale the
// consumer applies on top of the unit draw; it is carried here so a single
// object describes the noise completely.
struct StableSpec {
  double alpha = 2.0;  // tail index, in (1, 2]
  double sigma = 1.0;  // noise scale, > 0
  int dim = 1;         // dimension d, >= 1

  void validate() const;
};

// One draw from the subordinated-Gaussian representation
// xi = sqrt(2 * lambda) * gauss, where lambda is the one-sided (alpha/2)-
// stable mixing variable with Laplace transform E[exp(-s*lambda)] =
// exp(-s^{alpha/2}). The factor 2 is calibrated so that the marginal
// characteristic function is exactly exp(-||u||^alpha).
struct SubordinatedDraw {
  double lambda = 1.0;
  Vec gauss;
  Vec xi;
};

// Samples the positive mixing variable via the Kanter / Chambers-Mallows-
// Stuck transform of a uniform angle and an independent unit exponential
// (exact, no rejection). Requires alpha in (1, 2); the Gaussian endpoint is
// handled by sample_stable_vector, where the mixture degenerates to
// lambda == 1.
double sample_subordinator(double alpha, RngStream& rng);

// Full subordinated draw; exposes lambda and the Gaussian part for consumers
// that need the conditional decomposition (e.g. conditional KL evaluation).
SubordinatedDraw sample_subordinated(const StableSpec& spec, RngStream& rng);

// Unit-scale rotationally invariant stable vector with characteristic
// function exp(-||u||^alpha). At alpha == 2 this is N(0, 2 I). Draws are
// isotropic; coordinates are NOT independent for alpha < 2.
Vec sample_stable_vector(const StableSpec& spec, RngStream& rng);

// E||xi||^p = 2^p Gamma(1 - p/alpha) Gamma((d+p)/2) /
//             (Gamma(1 - p/2) Gamma(d/2)), valid for 0 <= p < alpha.
// Throws std::domain_error for p >= alpha (the moment diverges).
double stable_abs_moment(double alpha, double p, int dim);

// E[lambda^{-1/2}] = (2/sqrt(pi)) Gamma(1 + 1/alpha), for alpha in (1, 2].
double subordinator_neg_half_moment(double alpha);

// E[lambda^{(p-1)/2}] = Gamma((1 + alpha - p)/alpha) / Gamma((3 - p)/2),
// for alpha in (1, 2) and p in (0, 1]. Callers that need the contraction
// certificates must additionally restrict p to (0, min(1/2, alpha - 1)); that
// gating lives in the accountant.
double subordinator_power_moment(double alpha, double p);

}  // namespace stabledp

#endif  // STABLEDP_STABLE_NOISE_HPP
