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

#ifndef STABLEDP_ACCOUNTANT_HPP
#define STABLEDP_ACCOUNTANT_HPP

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "stabledp/problems.hpp"

namespace stabledp {

// Foster-Lyapunov drift certificate for the one-step kernel acting on
// V_p(theta) = (1 + ||theta - center||^2)^{p/2}:  (P V_p) <= beta V_p + H.
// The small-p regime covers p in (0, 1] (Gaussian noise included); the
// large-p regime covers p in [1, alpha) and is the one entering the privacy
// bound at exponent 1 + p.
struct DriftParams {
  enum class Regime { kSmallP, kLargeP };
  double beta = 0.0;
  double H = 0.0;
  double p = 0.0;
  Regime regime = Regime::kSmallP;
};

// V-uniform ergodicity constants of the base chain. They are not explicit in
// the theory; callers either supply them or accept the labeled heuristic
// default (c = 1, rho = small-p drift contraction factor). Budgets are
// always reported together with delta * (1 - rho) / c, which does not depend
// on the heuristic.
struct ErgodicityParams {
  double c = 1.0;
  double rho = 0.0;
  bool heuristic = true;
};

// Fully evaluated kernel-distance constants. `c_gamma` is the n-free
// constant: sup_theta ||P(theta,.) - Phat(theta,.)||_{V_p} / Vhat_p(theta)
// <= c_gamma / n. C1..C7 are recorded at the given n for auditability.
struct KernelIngredients {
  double c_gamma = 0.0;
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0, C5 = 0.0, C6 = 0.0, C7 = 0.0;
  double chi_moment = 0.0;     // E||G||^{2p}
  double center_offset = 0.0;  // ||theta_star|| (universal) or the stable-point bound
  double p = 0.0;
  double alpha = 0.0, sigma = 0.0, eta = 0.0;
  long n = 0;
  bool assumption3 = false;
};

struct PrivacyBudget {
  double delta = 0.0;
  double delta_times_n = 0.0;   // computed n-free; exactly constant across n
  double delta_normalized = 0.0;  // delta * (1 - rho) / c, free of the heuristic
  std::vector<std::pair<std::string, double>> ingredients;
};

// min(m / (2 K1^2), 1/m, 1): the admissible step-size cap for the privacy
// bound.
double step_size_limit(double m, double K1);

// E||G||^{2p} = 2^p Gamma(p + d/2) / Gamma(d/2) for a standard d-dim
// Gaussian.
double chi_moment(double p, int dim);

// Small-p drift: beta = 1 - eta m p / 2,
// H = 1 + (2 eta K)^{p/2} + sigma^p E||xi||^p. Requires p in (0, 1], p <
// alpha, eta < min(m/K1^2, 1/m).
DriftParams drift_small_p(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& consts, int dim);

// Large-p drift: beta = 1 - m p eta / 4 and H assembled from the fractional
// Laplacian constant sC = alpha 2^alpha Gamma((d+alpha)/2) /
// (Gamma(1-alpha/2) Gamma(d/2)). Requires p in [1, alpha), alpha in (1, 2)
// (the 1/(2-alpha) factor diverges at the Gaussian endpoint), eta <
// min(m/(2 K1^2), 1/m, 1).
DriftParams drift_large_p(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& consts, int dim);

// Kernel-distance constant under a universal stable point, with
// consts.theta_star_norm as ||theta_star||. Small-p regime only:
// p in (0, min(1/2, alpha - 1)), alpha in (1, 2), 1 - 2 eta m + eta^2 K1^2
// >= 0.
KernelIngredients c_gamma(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& consts, int dim, long n);

// Kernel-distance constant without a universal stable point; the stable
// points of the two mean losses are controlled through
// Chat = (B + sqrt(B^2 + 4 m K)) / (2 m). Default route for generic data.
KernelIngredients c_gamma_hat(double p, double alpha, double sigma, double eta,
                              const RegularityConstants& consts, int dim, long n);

// delta <= (1/n) c (1 - rho^k) c_gamma H_{1+p} / (2 (1-rho) (1-beta_{1+p})).
// Nondecreasing in k with a finite k -> infinity cap.
PrivacyBudget delta_bound(const ErgodicityParams& erg, long k, long n,
                          double c_gamma_value, const DriftParams& drift_1p);

// Pointwise analytic bound on ||P(theta,.) - Phat(theta,.)||_{V_p}:
// (C6 dist^p + C7) (1 + dist + center_offset), dist = ||theta - center||.
double per_step_vnorm_bound(const Vec& theta, const Vec& center,
                            const KernelIngredients& ing);

// Conditional KL between the one-step Gaussian mixture components given the
// mixing value lambda: eta^2 ||ga - gb||^2 / (2 lambda sigma^2) under this
// toolkit's calibrated conditional covariance 2 lambda sigma^2 I.
// `statement_convention` selects the phi sigma^2 I variant (no factor 2) for
// side-by-side reporting.
double kl_conditional(const Vec& grad_a, const Vec& grad_b, double eta,
                      double sigma, double lambda,
                      bool statement_convention = false);

struct DimScalingReport {
  std::vector<int> dims;
  std::vector<double> H;       // H_{1+p}(d)
  double fitted_slope = 0.0;   // least-squares on log H vs log d, top half
  double asymptotic_slope = 0.0;  // (alpha + 1) / 2
};

// Evaluates H_{1+p}(d) over the given dims (increasing, max 10^4) and fits
// the log-log slope over the top half of the list.
DimScalingReport dimension_scaling_report(double alpha, double p,
                                          const std::vector<int>& dims,
                                          double sigma, double eta,
                                          const RegularityConstants& consts);

struct InitialConditionReport {
  double estimate = 0.0;  // sample mean of (1 + ||theta - center||^2)^{(1+p)/2}
  double bound = 0.0;     // H_{1+p} / (1 - beta_{1+p})
  bool pass = false;
};

// Checks the initial-law moment condition of the privacy bound from samples
// of p0 (rows of `p0_samples`).
InitialConditionReport initial_condition_check(const Eigen::MatrixXd& p0_samples,
                                               const Vec& center,
                                               const DriftParams& drift_1p);

enum class Algorithm { kGradientDescent, kStochasticGradientDescent };

// End-to-end budget pipeline. The GD and SGD routes evaluate the identical
// formula (the batch size does not enter the bound); the tag is recorded for
// reporting. When erg.heuristic is set, rho defaults to the small-p drift
// contraction factor and c to 1, clearly labeled NON-RIGOROUS in reports.
struct BudgetInputs {
  double p = 0.0;
  double alpha = 0.0;
  double sigma = 0.0;
  double eta = 0.0;
  RegularityConstants consts;
  int dim = 0;
  long n = 0;
  long k = 0;
  ErgodicityParams erg;
  bool assumption3 = false;
  Algorithm algorithm = Algorithm::kGradientDescent;
};

PrivacyBudget compute_budget(const BudgetInputs& in);

// Interior default for the Lyapunov exponent: min(0.49, (alpha - 1) / 2).
double default_small_p(double alpha);

}  // namespace stabledp

#endif  // STABLEDP_ACCOUNTANT_HPP
