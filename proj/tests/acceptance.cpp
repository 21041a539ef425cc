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
// Acceptance suite: one self-contained criterion per number, one PASS/FAIL
// line each. Run `stabledp_acceptance <n>` for a single criterion or with no
// argument for all nine.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stabledp/accountant.hpp"
#include "stabledp/optimizer.hpp"
#include "stabledp/problems.hpp"
#include "stabledp/stable_noise.hpp"
#include "stabledp/verifier.hpp"
#include "transcription.hpp"

namespace stabledp::acceptance {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// 1. Empirical characteristic function of the stable sampler.
Outcome criterion_1() {
  const long n_draws = 1000000;
  double worst = 0.0;
  double worst_runtime = 0.0;
  bool pass = true;
  for (double alpha : {1.2, 1.5, 1.8, 2.0}) {
    for (int dim : {1, 5}) {
      const auto start = std::chrono::steady_clock::now();
      const StableSpec spec{alpha, 1.0, dim};
      RngStream draw_rng =
          RngStream(1000 + static_cast<std::uint64_t>(100 * alpha) + dim);
      RngStream dir_rng(7);
      std::vector<Vec> dirs;
      const double norms[3] = {0.5, 1.0, 2.0};
      for (int t = 0; t < 20; ++t) {
        Vec u(dim);
        for (int j = 0; j < dim; ++j) u[j] = dir_rng.next_gaussian();
        u.normalize();
        dirs.push_back(norms[t % 3] * u);
      }
      std::vector<double> acc(20, 0.0);
      for (long i = 0; i < n_draws; ++i) {
        const Vec xi = sample_stable_vector(spec, draw_rng);
        for (int t = 0; t < 20; ++t) acc[t] += std::cos(dirs[t].dot(xi));
      }
      for (int t = 0; t < 20; ++t) {
        const double err =
            std::abs(acc[t] / n_draws - std::exp(-std::pow(dirs[t].norm(), alpha)));
        worst = std::max(worst, err);
        pass = pass && err <= 0.01;
      }
      const double secs = seconds_since(start);
      worst_runtime = std::max(worst_runtime, secs);
      pass = pass && secs <= 120.0;
    }
  }
  std::ostringstream out;
  out << "max |ECF - exp(-||u||^a)| = " << worst
      << " (limit 0.01), slowest (alpha,d) took " << worst_runtime
      << " s (limit 120)";
  return {pass, out.str()};
}

// ---------------------------------------------------------------------------
// 2. Moment formulas: MC vs closed forms, quadrature at the boundary order,
//    and the exact Gaussian anchors.
Outcome criterion_2() {
  const long n_draws = 1000000;
  bool pass = true;
  double worst_xi = 0.0, worst_sub = 0.0, worst_quad = 0.0;
  for (double alpha : {1.2, 1.5, 1.8}) {
    // Fractional moments of ||xi|| at MC-concentrating orders (both below the
    // admissible ceiling alpha - 0.2).
    for (int dim : {1, 3}) {
      for (double ratio : {0.45, 0.55}) {
        const double p = ratio * alpha;
        const StableSpec spec{alpha, 1.0, dim};
        RngStream rng(2000 + static_cast<std::uint64_t>(1000 * alpha) + dim * 17 +
                      static_cast<std::uint64_t>(100 * ratio));
        double acc = 0.0;
        for (long i = 0; i < n_draws; ++i) {
          acc += std::pow(sample_stable_vector(spec, rng).squaredNorm(), p / 2.0);
        }
        const double rel =
            std::abs(acc / n_draws / stable_abs_moment(alpha, p, dim) - 1.0);
        worst_xi = std::max(worst_xi, rel);
        pass = pass && rel <= 0.02;
      }
    }
    // Subordinator moments (light-tailed functionals; plain MC).
    {
      RngStream rng(3000 + static_cast<std::uint64_t>(1000 * alpha));
      const double p = default_small_p(alpha);
      double neg_half = 0.0, power = 0.0;
      for (long i = 0; i < n_draws; ++i) {
        const double lam = sample_subordinator(alpha, rng);
        neg_half += 1.0 / std::sqrt(lam);
        power += std::pow(lam, (p - 1.0) / 2.0);
      }
      const double rel1 =
          std::abs(neg_half / n_draws / subordinator_neg_half_moment(alpha) - 1.0);
      const double rel2 =
          std::abs(power / n_draws / subordinator_power_moment(alpha, p) - 1.0);
      worst_sub = std::max({worst_sub, rel1, rel2});
      pass = pass && rel1 <= 0.01 && rel2 <= 0.01;
    }
    // Boundary order p = alpha - 0.2: deterministic quadrature through the
    // sampler's own angle/exponential representation (plain MC does not
    // concentrate at this order at 1e6 draws; see the decisions notes).
    for (int dim : {1, 5}) {
      const double p = alpha - 0.2;
      const double rel =
          std::abs(oracles::stable_abs_moment_quadrature(alpha, p, dim) /
                       stable_abs_moment(alpha, p, dim) -
                   1.0);
      worst_quad = std::max(worst_quad, rel);
      pass = pass && rel <= 1e-8;
    }
  }
  // Gaussian anchors, exact in closed form.
  pass = pass && std::abs(stable_abs_moment(2.0, 1.0, 1) -
                          2.0 / std::sqrt(oracles::kPi)) <= 1e-14;
  pass = pass && std::abs(subordinator_neg_half_moment(2.0) - 1.0) <= 1e-14;
  {  // and the alpha = 2 sampler agrees by MC
    const StableSpec spec{2.0, 1.0, 1};
    RngStream rng(2999);
    double acc = 0.0;
    for (long i = 0; i < n_draws; ++i) acc += std::abs(sample_stable_vector(spec, rng)[0]);
    const double rel = std::abs(acc / n_draws / (2.0 / std::sqrt(oracles::kPi)) - 1.0);
    pass = pass && rel <= 0.02;
    worst_xi = std::max(worst_xi, rel);
  }
  std::ostringstream out;
  out << "MC rel err: E||xi||^p " << worst_xi << " (limit 0.02), subordinator "
      << worst_sub << " (limit 0.01); boundary-order quadrature " << worst_quad
      << " (limit 1e-8)";
  return {pass, out.str()};
}

// ---------------------------------------------------------------------------
// 3. Ridge / logistic constants and assumption audits.
Outcome criterion_3() {
  bool pass = true;
  RngStream rng(31);
  double worst_margin = 1e300;
  for (int t = 0; t < 10; ++t) {
    const double radius = 0.3 + 2.0 * rng.next_double();
    const double lambda = 0.1 + 1.5 * rng.next_double();

    const RegularityConstants rc = ridge_constants(radius, lambda);
    pass = pass && rc.K1 == radius * radius + lambda && rc.K2 == 2.0 * radius &&
           rc.B == radius * radius && rc.m == lambda && rc.K == 0.0;
    const RegularityConstants lc = logistic_constants(radius, lambda);
    pass = pass && lc.K1 == radius * radius + lambda &&
           lc.K2 == std::max(1.0, radius) && lc.B == radius / 2.0 &&
           lc.m == lambda && lc.K == 0.0;

    const RidgeModel ridge(lambda, radius);
    const LogisticModel logistic(lambda, radius);
    for (const AuditReport& report :
         {check_pseudo_lipschitz(ridge, rc, 2, 100000, rng.derive(4 * t)),
          check_dissipativity(ridge, rc, 2, 100000, rng.derive(4 * t + 1)),
          check_pseudo_lipschitz(logistic, lc, 2, 100000, rng.derive(4 * t + 2)),
          check_dissipativity(logistic, lc, 2, 100000, rng.derive(4 * t + 3))}) {
      pass = pass && report.pass;
      worst_margin = std::min(worst_margin, report.worst_margin + report.ci_width);
    }
  }
  std::ostringstream out;
  out << "10 random (R, lambda) pairs, exact constants, 1e5-trial audits; worst "
         "audit margin "
      << worst_margin;
  return {pass, out.str()};
}

// ---------------------------------------------------------------------------
// 4. One-step drift audits in both regimes, plus the H/100 control.
Outcome criterion_4() {
  const auto start = std::chrono::steady_clock::now();
  bool pass = true;
  double worst = 1e300;
  const long reps = 4000;
  for (double alpha : {1.3, 1.5, 1.8}) {
    const double p_small = default_small_p(alpha);
    for (int which : {0, 1}) {
      const double lambda = 1.0, radius = 1.0;
      const RidgeModel ridge(lambda, radius);
      const LogisticModel logistic(lambda, radius);
      const LossModel& model = which == 0
                                   ? static_cast<const LossModel&>(ridge)
                                   : static_cast<const LossModel&>(logistic);
      const Dataset data = which == 0
                               ? make_synthetic_ridge(32, 1, radius, 400 + which)
                               : make_synthetic_logistic(32, 1, radius, 400 + which);
      const RegularityConstants consts = model.constants();
      const double eta = 0.5 * step_size_limit(consts.m, consts.K1);
      const double sigma = 0.5;
      const Vec center = find_stable_point(model, data, 1e-10);
      const auto grid = radial_grid(
          center, 10.0 * stable_point_norm_bound(consts.B, consts.m, consts.K), 21,
          RngStream(41 + which).derive(Stream::kGrid));
      const GdKernel kernel(data, model, eta, sigma, alpha);

      const auto small = verify_drift(
          kernel, drift_small_p(p_small, alpha, sigma, eta, consts, 1), center, grid,
          reps, RngStream(43).derive(static_cast<std::uint64_t>(alpha * 100) + which));
      const auto large = verify_drift(
          kernel, drift_large_p(1.0 + p_small, alpha, sigma, eta, consts, 1), center,
          grid, reps,
          RngStream(44).derive(static_cast<std::uint64_t>(alpha * 100) + which));
      pass = pass && small.pass && large.pass;
      worst = std::min({worst, small.worst_margin + small.ci_width,
                        large.worst_margin + large.ci_width});

      DriftParams broken = drift_large_p(1.0 + p_small, alpha, sigma, eta, consts, 1);
      broken.H /= 100.0;
      const auto control = verify_drift(
          kernel, broken, center, grid, reps,
          RngStream(44).derive(static_cast<std::uint64_t>(alpha * 100) + which));
      pass = pass && !control.pass;
    }
  }
  const double secs = seconds_since(start);
  pass = pass && secs <= 600.0;
  std::ostringstream out;
  out << "ridge+logistic, alpha in {1.3,1.5,1.8}, both regimes, 21-point grids; "
         "worst margin "
      << worst << "; H/100 controls all fail; " << secs << " s (limit 600)";
  return {pass, out.str()};
}

// ---------------------------------------------------------------------------
// 5. Kernel-distance audit and the dual transcription.
Outcome criterion_5() {
  bool pass = true;

  // Hand-built ridge fixture: the hardest single swap on a d = 1 dataset.
  const RidgeModel model(1.0, 1.0);
  Dataset data = make_synthetic_ridge(12, 1, 1.0, 4242);
  data.points[0] << 1.0, 0.0;
  DataPoint swapped(2);
  swapped << 0.0, 1.0;
  const Dataset neighbor = make_neighbor(data, 0, swapped);
  const RegularityConstants consts = model.constants();
  const double alpha = 1.5, sigma = 0.5;
  const double eta = 0.5 * step_size_limit(consts.m, consts.K1);
  const double p = default_small_p(alpha);
  const Vec center = find_stable_point(model, data, 1e-10);
  const Vec center_hat = find_stable_point(model, neighbor, 1e-10);
  const auto grid = radial_grid(
      center_hat, 10.0 * stable_point_norm_bound(consts.B, consts.m, consts.K), 21,
      RngStream(51).derive(Stream::kGrid));
  const auto ing = c_gamma_hat(p, alpha, sigma, eta, consts, 1, data.size());

  const auto audit = verify_gamma(model, data, neighbor, ing, center, center_hat,
                                  grid, 4000, RngStream(52));
  pass = pass && audit.pass;

  // Identical-dataset control: the integrand is identically zero, so the
  // margin equals the bound at every grid point.
  const auto control = verify_gamma(model, data, data, ing, center, center, grid,
                                    2000, RngStream(53));
  pass = pass && control.pass && control.worst_margin > 0.0 &&
         control.ci_width == 0.0;

  // Dual transcription on 100 random parameter sets.
  RngStream rng(54);
  double worst_rel = 0.0;
  int checked = 0;
  while (checked < 100) {
    RegularityConstants c = transcription::sample_constants(rng);
    const double a = 1.05 + 0.9 * rng.next_double();
    const double pm = std::min(0.5, a - 1.0) * (0.05 + 0.9 * rng.next_double());
    const double s = 0.1 + 2.9 * rng.next_double();
    const double cap = step_size_limit(c.m, c.K1);
    const double e = cap * (0.05 + 0.9 * rng.next_double());
    const int d = 1 + static_cast<int>(rng.next_below(50));
    const long n = 1 + static_cast<long>(rng.next_below(10000));
    if (1.0 - 2.0 * e * c.m + e * e * c.K1 * c.K1 < 0.0) continue;
    ++checked;
    const auto rel = [](double mine, double ref) {
      return std::abs(mine - ref) / std::max(std::abs(ref), 1e-30);
    };
    const double r1 = rel(c_gamma(pm, a, s, e, c, d, n).c_gamma,
                          transcription::c_gamma_ref(pm, a, s, e, c, d, n));
    const double r2 = rel(c_gamma_hat(pm, a, s, e, c, d, n).c_gamma,
                          transcription::c_gamma_hat_ref(pm, a, s, e, c, d, n));
    const double r3 = rel(drift_large_p(1.0 + pm, a, s, e, c, d).H,
                          transcription::H_large_ref(1.0 + pm, a, s, e, c, d));
    worst_rel = std::max({worst_rel, r1, r2, r3});
    pass = pass && r1 <= 1e-12 && r2 <= 1e-12 && r3 <= 1e-12;
  }
  std::ostringstream out;
  out << "21-point audit margin " << audit.worst_margin << " (+" << audit.ci_width
      << " allowance); identical-pair control margin " << control.worst_margin
      << "; dual-transcription worst rel " << worst_rel << " (limit 1e-12)";
  return {pass, out.str()};
}

// ---------------------------------------------------------------------------
// 6. Structure of the privacy bound.
Outcome criterion_6() {
  bool pass = true;
  BudgetInputs in;
  in.alpha = 1.5;
  in.p = default_small_p(in.alpha);
  in.sigma = 0.5;
  in.consts = ridge_constants(1.0, 0.5);
  in.eta = 0.5 * step_size_limit(in.consts.m, in.consts.K1);
  in.dim = 2;
  in.k = 500;

  // delta * n constant across n.
  double reference = -1.0;
  for (long n : {100L, 1000L, 10000L}) {
    in.n = n;
    const PrivacyBudget b = compute_budget(in);
    if (reference < 0.0) reference = b.delta_times_n;
    pass = pass && b.delta_times_n == reference;
    pass = pass && std::abs(b.delta * n / reference - 1.0) <= 1e-12;
  }

  // Nondecreasing in k with a finite limit.
  in.n = 1000;
  double prev = -1.0;
  for (long k : {0L, 1L, 3L, 10L, 100L, 10000L}) {
    in.k = k;
    const double delta = compute_budget(in).delta;
    pass = pass && delta >= prev;
    prev = delta;
  }
  in.k = 1L << 40;
  const double cap = compute_budget(in).delta;
  pass = pass && prev <= cap && std::isfinite(cap);

  // GD and SGD paths coincide.
  in.k = 500;
  in.algorithm = Algorithm::kGradientDescent;
  const double gd = compute_budget(in).delta;
  in.algorithm = Algorithm::kStochasticGradientDescent;
  const double sgd = compute_budget(in).delta;
  pass = pass && gd == sgd;

  std::ostringstream out;
  out << "delta*n = " << reference << " constant over n in {1e2,1e3,1e4}; "
      << "delta(k) nondecreasing with cap " << cap << "; GD == SGD";
  return {pass, out.str()};
}

// ---------------------------------------------------------------------------
// 7. Dimension scaling of the drift offset.
Outcome criterion_7() {
  RegularityConstants c;
  c.m = 1.0;
  c.K1 = 1.0;
  c.K = 0.0;
  const std::vector<int> dims{64, 128, 256, 512, 1024, 2048, 4096};
  bool within = true;
  bool increasing = true;
  std::ostringstream out;
  double prev_slope = 0.0;
  for (double alpha : {1.2, 1.5, 1.8}) {
    const auto report =
        dimension_scaling_report(alpha, 0.05, dims, /*sigma=*/0.1, /*eta=*/0.01, c);
    const double diff = report.fitted_slope - report.asymptotic_slope;
    within = within && std::abs(diff) <= 0.05;
    increasing = increasing && report.fitted_slope > prev_slope;
    prev_slope = report.fitted_slope;
    out << "alpha=" << alpha << ": slope " << report.fitted_slope << " vs "
        << report.asymptotic_slope << " (diff " << diff << "); ";
  }
  out << (increasing ? "slopes increase with alpha" : "ordering violated");
  if (!within) {
    out << " | NOTE: the exact drift-offset formula carries subleading terms "
           "decaying only like d^{-1/2} relative to the leading power, so the "
           "fitted slope over d <= 4096 sits below (alpha+1)/2 by more than "
           "0.05 for the heavier tails; no admissible parameter choice closes "
           "the gap (see the decisions ledger)";
  }
  return {within && increasing, out.str()};
}

// ---------------------------------------------------------------------------
// 8. Empirical TV stability of the chain, plus the estimator's closed-form
//    anchor.
Outcome criterion_8() {
  const auto start = std::chrono::steady_clock::now();
  bool pass = true;

  // Estimator anchor: TV(N(0,1), N(1,1)) = 2 Phi(1/2) - 1.
  {
    RngStream rng(81);
    Eigen::MatrixXd g1(100000, 1), g2(100000, 1);
    for (int i = 0; i < g1.rows(); ++i) g1(i, 0) = rng.next_gaussian();
    for (int i = 0; i < g2.rows(); ++i) g2(i, 0) = rng.next_gaussian() + 1.0;
    const double tv = estimate_tv_histogram(g1, g2, 100);
    pass = pass && std::abs(tv - 0.38292492254802621) <= 0.02;
  }

  // d = 1 ridge with one point swapped across the data ball.
  const double radius = 1.5;
  const RidgeModel model(0.5, radius);
  auto family = [radius](int n) {
    Dataset data = make_synthetic_ridge(n, 1, radius, 8800 + n);
    data.points[0] << 1.0, 1.0;
    DataPoint swapped(2);
    swapped << 0.1, -1.2;  // moves both the design and the cross moment
    return std::make_pair(data, make_neighbor(data, 0, swapped));
  };
  ChainConfig cfg;
  cfg.eta = 0.3;
  cfg.sigma = 0.25;
  cfg.alpha = 1.5;
  cfg.seed = 8888;
  cfg.init = InitPolicy::kStablePoint;
  const auto report = verify_tv_stability(model, family, cfg, {32, 128, 512},
                                          {200, 800}, 200000, 60, /*threads=*/2);
  pass = pass && report.pass;

  const double secs = seconds_since(start);
  pass = pass && secs <= 1200.0;
  std::ostringstream out;
  out << "Gaussian anchor within 0.02; de-biased TV: ";
  for (const TvCell& cell : report.cells) {
    out << "(n=" << cell.n << ",k=" << cell.k << ") " << cell.debiased << "+-"
        << cell.boot_sd << "; ";
  }
  out << (report.nonincreasing_in_n ? "nonincreasing in n" : "NOT nonincreasing")
      << ", " << (report.stable_in_k ? "k-stable" : "NOT k-stable") << "; " << secs
      << " s (limit 1200)";
  return {pass, out.str()};
}

// ---------------------------------------------------------------------------
// 9. Lyapunov norm bounds by finite differences.
Outcome criterion_9() {
  const auto report = verify_vp_norm_bounds(1.3, 1.5, 5, 1000, RngStream(91));
  const auto report2 = verify_vp_norm_bounds(1.0, 1.3, 3, 1000, RngStream(92));
  std::ostringstream out;
  out << "1000 random points at (p=1.3, d=5) and (p=1.0, d=3), worst margins "
      << report.worst_margin << " and " << report2.worst_margin
      << " with 1e-4 slack";
  return {report.pass && report2.pass, out.str()};
}

}  // namespace
}  // namespace stabledp::acceptance

int main(int argc, char** argv) {
  using stabledp::acceptance::Outcome;
  using Runner = Outcome (*)();
  const Runner runners[9] = {
      stabledp::acceptance::criterion_1, stabledp::acceptance::criterion_2,
      stabledp::acceptance::criterion_3, stabledp::acceptance::criterion_4,
      stabledp::acceptance::criterion_5, stabledp::acceptance::criterion_6,
      stabledp::acceptance::criterion_7, stabledp::acceptance::criterion_8,
      stabledp::acceptance::criterion_9};
  const char* names[9] = {
      "stable law (empirical characteristic function)",
      "moment formulas (MC, quadrature, exact anchors)",
      "ridge/logistic constants and assumption audits",
      "one-step drift audits with falsification control",
      "kernel-distance audit and dual transcription",
      "privacy-bound structure (1/n, k-monotone, GD=SGD)",
      "dimension scaling of the drift offset",
      "empirical TV stability",
      "Lyapunov norm bounds by finite differences"};

  int first = 1, last = 9;
  if (argc > 1) {
    const int which = std::atoi(argv[1]);
    if (which < 1 || which > 9) {
      std::fprintf(stderr, "usage: %s [1-9]\n", argv[0]);
      return 2;
    }
    first = last = which;
  }
  int failures = 0;
  for (int i = first; i <= last; ++i) {
    const Outcome outcome = runners[i - 1]();
    std::printf("criterion %d [%s]: %s\n    %s\n", i, outcome.pass ? "PASS" : "FAIL",
                names[i - 1], outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
