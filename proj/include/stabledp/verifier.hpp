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

#ifndef STABLEDP_VERIFIER_HPP
#define STABLEDP_VERIFIER_HPP

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "stabledp/accountant.hpp"
#include "stabledp/audit.hpp"
#include "stabledp/optimizer.hpp"
#include "stabledp/problems.hpp"

namespace stabledp {

// Full-gradient one-step transition theta -> theta - eta grad F + sigma xi,
// with the mean gradient bound once at construction.
class GdKernel {
 public:
  GdKernel(const Dataset& data, const LossModel& model, double eta,
           double sigma, double alpha);

  Vec step(const Vec& theta, RngStream& rng) const;
  Vec mean_grad(const Vec& theta) const { return mean_grad_(theta); }
  double eta() const { return eta_; }
  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  int dim() const { return dim_; }

 private:
  std::function<Vec(const Vec&)> mean_grad_;
  double eta_, sigma_, alpha_;
  int dim_;
};

// `count` points center + r_i u_i with radii equally spaced on [0, r_max]
// and fresh random directions. Every bound being audited depends on theta
// only through ||theta - center||, so a radial design covers the geometry.
std::vector<Vec> radial_grid(const Vec& center, double r_max, int count,
                             RngStream rng);

// One-step drift audit: at each grid point, Monte-Carlo estimates
// E[V_p(theta_1) | theta_0 = theta] with `reps` transitions and checks it
// against beta V_p(theta) + H plus a 3-standard-error allowance. V_p draws
// have finite variance only when 2p < alpha; above that the estimate uses
// median-of-means over 16 blocks with a MAD-based spread (heavier-tailed
// concentration, so the allowance is indicative rather than a sharp CI).
AuditReport verify_drift(const GdKernel& kernel, const DriftParams& drift,
                         const Vec& center, const std::vector<Vec>& grid,
                         long reps, RngStream rng);

// Kernel-distance audit of the evaluated constant chain: at each grid point,
// averages the conditional-KL integrand
//   sqrt(2 (mu(V_p^2) + muhat(V_p^2)) KL)
// over mixing-variable draws and checks it against
// c_gamma Vhat_p(theta) / n + 3 SE. The Gaussian V_p^2 moments use the exact
// conditional mean/covariance with a concavity (upper) closed form, so the
// audited integrand dominates the true one.
AuditReport verify_gamma(const LossModel& model, const Dataset& data,
                         const Dataset& neighbor, const KernelIngredients& ing,
                         const Vec& v_center, const Vec& vhat_center,
                         const std::vector<Vec>& grid, long reps, RngStream rng);

// Histogram total variation between two sample sets (rows = samples,
// dim <= 3): half the L1 distance between normalized histograms over a
// common bounding box extended 5% beyond the pooled range. Upward-biased at
// finite sample size; see split_half_baseline.
double estimate_tv_histogram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             int bins_per_axis);

// Same-distribution calibration: histogram TV between the two halves of one
// sample set. Subtracting it from an estimate removes most of the finite-N
// bias.
double split_half_baseline(const Eigen::MatrixXd& a, int bins_per_axis);

struct TvCell {
  int n = 0;
  long k = 0;
  double tv = 0.0;
  double baseline = 0.0;
  double debiased = 0.0;
  double boot_sd = 0.0;
};

struct TvTrendReport {
  std::vector<TvCell> cells;
  bool nonincreasing_in_n = false;
  bool stable_in_k = false;
  bool pass = false;
};

// Empirical stability trend: for each n in n_list and each k in k_list, runs
// 2 x `replicas` chains on a dataset/neighbor pair produced by `family(n)`,
// estimates the de-biased histogram TV between the final laws, and asserts
// (a) nonincreasing in n up to 3 combined bootstrap SDs and (b) agreement
// across the k values at fixed n. Samples are passed through atan
// coordinatewise before histogramming: TV is invariant under coordinatewise
// strictly monotone maps, and the compactified range keeps the bins
// resolving the bulk despite heavy-tailed outliers.
TvTrendReport verify_tv_stability(
    const LossModel& model,
    const std::function<std::pair<Dataset, Dataset>(int)>& family,
    const ChainConfig& cfg, const std::vector<int>& n_list,
    const std::vector<long>& k_list, long replicas, int bins_per_axis,
    int threads = 1);

// Finite-difference audit of the Lyapunov-function derivative bounds
// ||grad V_p|| <= p ||theta - x||^{p-1} and ||hess V_p||_F <= p (sqrt(d)+2)
// at random (theta, x), with 1e-4 slack.
AuditReport verify_vp_norm_bounds(double p, double alpha, int dim, long trials,
                                  RngStream rng);

struct FalsificationReport {
  AuditReport drift_intact;
  AuditReport drift_broken;   // H / 100: must fail
  AuditReport gamma_intact;
  AuditReport gamma_broken;   // c_gamma / 100: must fail
  bool ok() const {
    return drift_intact.pass && !drift_broken.pass && gamma_intact.pass &&
           !gamma_broken.pass;
  }
};

// Re-runs the drift and kernel-distance audits on a fixed ridge fixture with
// one constant deliberately corrupted, asserting that the suite actually
// fails; guards against vacuously passing bounds.
FalsificationReport falsification_controls(std::uint64_t seed);

}  // namespace stabledp

#endif  // STABLEDP_VERIFIER_HPP
