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

#include "stabledp/accountant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stabledp/special.hpp"
#include "stabledp/stable_noise.hpp"

namespace stabledp {

namespace {

void require_small_p_regime(double p, double alpha) {
  if (!(alpha > 1.0) || !(alpha < 2.0)) {
    throw std::domain_error("kernel-distance constants require alpha in (1, 2)");
  }
  if (!(p > 0.0) || !(p < std::min(0.5, alpha - 1.0))) {
    throw std::domain_error(
        "kernel-distance constants require p in (0, min(1/2, alpha - 1))");
  }
}

// Shared assembly: everything downstream of C1. Passing the n-free
// C1' = 2 K2 D eta / sigma makes c_gamma exactly independent of n.
struct Chain {
  double C2, C3, C4, C5, C6, C7, Cp;
};

Chain assemble_chain(double c1, double p, double alpha, double sigma,
                     double eta, const RegularityConstants& consts, int dim,
                     bool hat, double hat_offset) {
  const double contraction = 1.0 - 2.0 * eta * consts.m + eta * eta * consts.K1 * consts.K1;
  if (contraction < 0.0) {
    throw std::domain_error("kernel-distance constants require 1 - 2 eta m + eta^2 K1^2 >= 0");
  }
  Chain c;
  c.C2 = subordinator_neg_half_moment(alpha);
  c.C3 = subordinator_power_moment(alpha, p);
  c.C4 = 2.0 * c1 * c.C2;
  c.C5 = 2.0 * c1 * c.C3;
  c.Cp = chi_moment(p, dim);
  c.C6 = c.C4 * std::pow(contraction, p / 2.0);
  const double k_term = std::pow(2.0 * eta * consts.K, p / 2.0);
  const double noise_term = c.C5 * std::sqrt(2.0) * std::pow(sigma, p) * std::sqrt(c.Cp);
  if (hat) {
    c.C7 = c.C4 + c.C4 * k_term + noise_term +
           std::sqrt(2.0) * c.C4 * std::pow(hat_offset, p);
  } else {
    c.C7 = c.C4 * (std::sqrt(2.0) + k_term) + noise_term;
  }
  return c;
}

KernelIngredients build_ingredients(double p, double alpha, double sigma,
                                    double eta, const RegularityConstants& consts,
                                    int dim, long n, bool hat) {
  require_small_p_regime(p, alpha);
  if (!(sigma > 0.0)) throw std::domain_error("kernel-distance constants require sigma > 0");
  if (!(eta > 0.0)) throw std::domain_error("kernel-distance constants require eta > 0");
  if (n < 1) throw std::domain_error("kernel-distance constants require n >= 1");
  if (consts.D < 0.0) throw std::domain_error("data diameter must be >= 0");

  const double offset =
      hat ? stable_point_norm_bound(consts.B, consts.m, consts.K) : consts.theta_star_norm;
  const double c1_nfree = 2.0 * consts.K2 * consts.D * eta / sigma;
  const Chain nf = assemble_chain(c1_nfree, p, alpha, sigma, eta, consts, dim, hat, offset);

  KernelIngredients ing;
  ing.c_gamma = (nf.C6 + nf.C7) * (2.0 + offset);
  const double inv_n = 1.0 / static_cast<double>(n);
  ing.C1 = c1_nfree * inv_n;
  ing.C2 = nf.C2;
  ing.C3 = nf.C3;
  ing.C4 = nf.C4 * inv_n;
  ing.C5 = nf.C5 * inv_n;
  ing.C6 = nf.C6 * inv_n;
  ing.C7 = nf.C7 * inv_n;
  ing.chi_moment = nf.Cp;
  ing.center_offset = offset;
  ing.p = p;
  ing.alpha = alpha;
  ing.sigma = sigma;
  ing.eta = eta;
  ing.n = n;
  ing.assumption3 = !hat;
  return ing;
}

}  // namespace

double step_size_limit(double m, double K1) {
  if (!(m > 0.0) || !(K1 > 0.0)) {
    throw std::domain_error("step_size_limit: m and K1 must be positive");
  }
  return std::min({m / (2.0 * K1 * K1), 1.0 / m, 1.0});
}

double chi_moment(double p, int dim) {
  if (!(p > 0.0)) throw std::domain_error("chi_moment: p must be positive");
  if (dim < 1) throw std::domain_error("chi_moment: dim must be >= 1");
  const double d = static_cast<double>(dim);
  return std::exp(p * std::log(2.0) + log_gamma(p + d / 2.0) - log_gamma(d / 2.0));
}

DriftParams drift_small_p(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& consts, int dim) {
  if (!(p > 0.0) || !(p <= 1.0)) {
    throw std::domain_error("drift_small_p: p must lie in (0, 1]");
  }
  if (!(p < alpha)) throw std::domain_error("drift_small_p: need p < alpha");
  if (!(alpha > 1.0) || !(alpha <= 2.0)) {
    throw std::domain_error("drift_small_p: alpha must lie in (1, 2]");
  }
  if (!(eta > 0.0) ||
      !(eta < std::min(consts.m / (consts.K1 * consts.K1), 1.0 / consts.m))) {
    throw std::domain_error("drift_small_p: need 0 < eta < min(m/K1^2, 1/m)");
  }
  if (sigma < 0.0) throw std::domain_error("drift_small_p: sigma must be >= 0");

  DriftParams drift;
  drift.regime = DriftParams::Regime::kSmallP;
  drift.p = p;
  drift.beta = 1.0 - eta * consts.m * p / 2.0;
  drift.H = 1.0 + std::pow(2.0 * eta * consts.K, p / 2.0) +
            (sigma > 0.0 ? std::pow(sigma, p) * stable_abs_moment(alpha, p, dim) : 0.0);
  return drift;
}

DriftParams drift_large_p(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& consts, int dim) {
  if (!(alpha > 1.0) || !(alpha < 2.0)) {
    throw std::domain_error(
        "drift_large_p: alpha must lie in (1, 2); the 1/(2-alpha) factor "
        "diverges at the Gaussian endpoint");
  }
  if (!(p >= 1.0) || !(p < alpha)) {
    throw std::domain_error("drift_large_p: p must lie in [1, alpha)");
  }
  if (!(eta > 0.0) || !(eta < step_size_limit(consts.m, consts.K1))) {
    throw std::domain_error("drift_large_p: need 0 < eta < min(m/(2K1^2), 1/m, 1)");
  }
  if (sigma < 0.0) throw std::domain_error("drift_large_p: sigma must be >= 0");

  const double d = static_cast<double>(dim);
  const double m = consts.m;
  const double K = consts.K;

  // Fractional Laplacian constant of the Lyapunov function.
  const double frac_const =
      alpha * std::pow(2.0, alpha) *
      std::exp(log_gamma((d + alpha) / 2.0) - log_gamma(1.0 - alpha / 2.0) -
               log_gamma(d / 2.0));

  const double sigma_a = std::pow(sigma, alpha);
  const double young_b1 = (sigma_a / eta) * (frac_const * p / (alpha - 1.0)) *
                          std::pow(4.0 / (m * p), p - 1.0);
  // (2 eta K)^{(p-1)/2}; pow(0, 0) == 1 covers the K == 0, p == 1 corner.
  const double k_pow = std::pow(2.0 * eta * K, (p - 1.0) / 2.0);
  const double tail_moment = (frac_const * p / (alpha - 1.0)) *
                             (alpha * std::pow(sigma, alpha + p - 1.0) / (alpha + p - 1.0)) *
                             stable_abs_moment(alpha, p - 1.0, dim);
  const double laplacian_budget =
      eta * std::pow(young_b1, p) / p +
      frac_const * sigma_a *
          (p * (std::sqrt(d) + 2.0) / (2.0 - alpha) + p * k_pow / (alpha - 1.0) +
           1.0 / (alpha - p)) +
      tail_moment;

  DriftParams drift;
  drift.regime = DriftParams::Regime::kLargeP;
  drift.p = p;
  drift.beta = 1.0 - m * p * eta / 4.0;
  drift.H = eta * (p * (m / 2.0 + K) + m * std::pow(2.0 * K, p / 2.0)) +
            laplacian_budget;
  return drift;
}

KernelIngredients c_gamma(double p, double alpha, double sigma, double eta,
                          const RegularityConstants& consts, int dim, long n) {
  return build_ingredients(p, alpha, sigma, eta, consts, dim, n, /*hat=*/false);
}

KernelIngredients c_gamma_hat(double p, double alpha, double sigma, double eta,
                              const RegularityConstants& consts, int dim, long n) {
  return build_ingredients(p, alpha, sigma, eta, consts, dim, n, /*hat=*/true);
}

PrivacyBudget delta_bound(const ErgodicityParams& erg, long k, long n,
                          double c_gamma_value, const DriftParams& drift_1p) {
  if (!(erg.c > 0.0)) throw std::domain_error("delta_bound: c must be positive");
  if (!(erg.rho > 0.0) || !(erg.rho < 1.0)) {
    throw std::domain_error("delta_bound: rho must lie in (0, 1)");
  }
  if (k < 0) throw std::domain_error("delta_bound: k must be >= 0");
  if (n < 1) throw std::domain_error("delta_bound: n must be >= 1");
  if (!(c_gamma_value >= 0.0)) throw std::domain_error("delta_bound: c_gamma must be >= 0");
  if (drift_1p.regime != DriftParams::Regime::kLargeP || !(drift_1p.p > 1.0)) {
    throw std::domain_error("delta_bound: drift must be the large-p certificate at exponent 1 + p");
  }
  if (!(drift_1p.beta > 0.0) || !(drift_1p.beta < 1.0)) {
    throw std::domain_error("delta_bound: drift contraction factor must lie in (0, 1)");
  }

  const double rho_k = std::pow(erg.rho, static_cast<double>(k));
  PrivacyBudget budget;
  budget.delta_times_n = erg.c * (1.0 - rho_k) * c_gamma_value * drift_1p.H /
                         (2.0 * (1.0 - erg.rho) * (1.0 - drift_1p.beta));
  budget.delta = budget.delta_times_n / static_cast<double>(n);
  budget.delta_normalized = budget.delta * (1.0 - erg.rho) / erg.c;
  return budget;
}

double per_step_vnorm_bound(const Vec& theta, const Vec& center,
                            const KernelIngredients& ing) {
  const double dist = (theta - center).norm();
  return (ing.C6 * std::pow(dist, ing.p) + ing.C7) *
         (1.0 + dist + ing.center_offset);
}

double kl_conditional(const Vec& grad_a, const Vec& grad_b, double eta,
                      double sigma, double lambda, bool statement_convention) {
  if (!(lambda > 0.0)) throw std::domain_error("kl_conditional: lambda must be positive");
  if (!(sigma > 0.0)) throw std::domain_error("kl_conditional: sigma must be positive");
  const double scale = statement_convention ? 1.0 : 2.0;
  return eta * eta * (grad_a - grad_b).squaredNorm() / (scale * lambda * sigma * sigma);
}

DimScalingReport dimension_scaling_report(double alpha, double p,
                                          const std::vector<int>& dims,
                                          double sigma, double eta,
                                          const RegularityConstants& consts) {
  if (dims.size() < 2) throw std::invalid_argument("dimension_scaling_report: need >= 2 dims");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] > 10000) throw std::invalid_argument("dimension_scaling_report: max dim is 1e4");
    if (i > 0 && dims[i] <= dims[i - 1]) {
      throw std::invalid_argument("dimension_scaling_report: dims must be increasing");
    }
  }
  DimScalingReport report;
  report.dims = dims;
  report.asymptotic_slope = (alpha + 1.0) / 2.0;
  for (int d : dims) {
    report.H.push_back(drift_large_p(1.0 + p, alpha, sigma, eta, consts, d).H);
  }
  // Least squares on (log d, log H) over the top half of the list.
  const std::size_t lo = dims.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(dims.size() - lo);
  for (std::size_t i = lo; i < dims.size(); ++i) {
    const double x = std::log(static_cast<double>(dims[i]));
    const double y = std::log(report.H[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.fitted_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return report;
}

InitialConditionReport initial_condition_check(const Eigen::MatrixXd& p0_samples,
                                               const Vec& center,
                                               const DriftParams& drift_1p) {
  if (p0_samples.rows() < 1 || p0_samples.cols() != center.size()) {
    throw std::invalid_argument("initial_condition_check: sample/center shape mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index r = 0; r < p0_samples.rows(); ++r) {
    const double d2 = (p0_samples.row(r).transpose() - center).squaredNorm();
    acc += std::pow(1.0 + d2, drift_1p.p / 2.0);
  }
  InitialConditionReport report;
  report.estimate = acc / static_cast<double>(p0_samples.rows());
  report.bound = drift_1p.H / (1.0 - drift_1p.beta);
  report.pass = report.estimate <= report.bound;
  return report;
}

double default_small_p(double alpha) { return std::min(0.49, (alpha - 1.0) / 2.0); }

PrivacyBudget compute_budget(const BudgetInputs& in) {
  if (!(in.eta > 0.0) || !(in.eta < step_size_limit(in.consts.m, in.consts.K1))) {
    throw std::domain_error("compute_budget: eta violates min(m/(2K1^2), 1/m, 1)");
  }
  const KernelIngredients kernel =
      in.assumption3
          ? c_gamma(in.p, in.alpha, in.sigma, in.eta, in.consts, in.dim, in.n)
          : c_gamma_hat(in.p, in.alpha, in.sigma, in.eta, in.consts, in.dim, in.n);
  const DriftParams drift =
      drift_large_p(1.0 + in.p, in.alpha, in.sigma, in.eta, in.consts, in.dim);

  ErgodicityParams erg = in.erg;
  if (erg.heuristic) {
    erg.c = 1.0;
    erg.rho = drift_small_p(in.p, in.alpha, in.sigma, in.eta, in.consts, in.dim).beta;
  }

  PrivacyBudget budget = delta_bound(erg, in.k, in.n, kernel.c_gamma, drift);

  auto& ing = budget.ingredients;
  ing.emplace_back("algorithm", in.algorithm == Algorithm::kGradientDescent ? 0.0 : 1.0);
  ing.emplace_back("alpha", in.alpha);
  ing.emplace_back("p", in.p);
  ing.emplace_back("sigma", in.sigma);
  ing.emplace_back("eta", in.eta);
  ing.emplace_back("n", static_cast<double>(in.n));
  ing.emplace_back("k", static_cast<double>(in.k));
  ing.emplace_back("dim", static_cast<double>(in.dim));
  ing.emplace_back("K1", in.consts.K1);
  ing.emplace_back("K2", in.consts.K2);
  ing.emplace_back("B", in.consts.B);
  ing.emplace_back("m", in.consts.m);
  ing.emplace_back("K", in.consts.K);
  ing.emplace_back("D", in.consts.D);
  ing.emplace_back("assumption3", kernel.assumption3 ? 1.0 : 0.0);
  ing.emplace_back("center_offset", kernel.center_offset);
  ing.emplace_back("C1", kernel.C1);
  ing.emplace_back("C2", kernel.C2);
  ing.emplace_back("C3", kernel.C3);
  ing.emplace_back("C4", kernel.C4);
  ing.emplace_back("C5", kernel.C5);
  ing.emplace_back("C6", kernel.C6);
  ing.emplace_back("C7", kernel.C7);
  ing.emplace_back("chi_moment", kernel.chi_moment);
  ing.emplace_back("c_gamma", kernel.c_gamma);
  ing.emplace_back("beta_1p", drift.beta);
  ing.emplace_back("H_1p", drift.H);
  // Initial-law moment cap: a point mass at the stable point has moment 1,
  // which always sits below this.
  ing.emplace_back("initial_moment_cap", drift.H / (1.0 - drift.beta));
  ing.emplace_back("erg_c", erg.c);
  ing.emplace_back("erg_rho", erg.rho);
  ing.emplace_back("erg_heuristic", erg.heuristic ? 1.0 : 0.0);
  ing.emplace_back("delta", budget.delta);
  ing.emplace_back("delta_times_n", budget.delta_times_n);
  ing.emplace_back("delta_normalized", budget.delta_normalized);
  return budget;
}

}  // namespace stabledp
