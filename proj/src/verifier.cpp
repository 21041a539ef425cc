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

#include "stabledp/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "stabledp/stable_noise.hpp"

namespace stabledp {

namespace {

double vp(const Vec& theta, const Vec& center, double p) {
  return std::pow(1.0 + (theta - center).squaredNorm(), p / 2.0);
}

double median_inplace(std::vector<double>& v) {
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + h, v.end());
  double m = v[h];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + h));
  }
  return m;
}

struct MeanWithAllowance {
  double estimate;
  double allowance;  // 3 standard errors (robust spread for median-of-means)
};

// Plain mean when the draws have finite variance, median-of-means over 16
// blocks otherwise.
MeanWithAllowance heavy_tail_mean(const std::vector<double>& draws, bool finite_variance) {
  const double n = static_cast<double>(draws.size());
  if (finite_variance) {
    double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : draws) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    return {mean, 3.0 * se};
  }
  constexpr int kBlocks = 16;
  const std::size_t block = draws.size() / kBlocks;
  std::vector<double> block_means(kBlocks);
  for (int b = 0; b < kBlocks; ++b) {
    double acc = 0.0;
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) acc += draws[i];
    block_means[b] = acc / static_cast<double>(block);
  }
  std::vector<double> tmp = block_means;
  const double est = median_inplace(tmp);
  std::vector<double> dev(kBlocks);
  for (int b = 0; b < kBlocks; ++b) dev[b] = std::abs(block_means[b] - est);
  const double mad = median_inplace(dev);
  const double robust_se = 1.4826 * mad / std::sqrt(static_cast<double>(kBlocks));
  return {est, 3.0 * robust_se};
}

}  // namespace

GdKernel::GdKernel(const Dataset& data, const LossModel& model, double eta,
                   double sigma, double alpha)
    : mean_grad_(model.bind_mean_gradient(data)),
      eta_(eta),
      sigma_(sigma),
      alpha_(alpha),
      dim_(model.param_dim(data.point_dim())) {
  if (!(eta >= 0.0) || !(sigma >= 0.0)) {
    throw std::domain_error("GdKernel: eta and sigma must be >= 0");
  }
}

Vec GdKernel::step(const Vec& theta, RngStream& rng) const {
  Vec next = theta - eta_ * mean_grad_(theta);
  if (sigma_ > 0.0) {
    const StableSpec spec{alpha_, sigma_, dim_};
    next += sigma_ * sample_stable_vector(spec, rng);
  }
  return next;
}

std::vector<Vec> radial_grid(const Vec& center, double r_max, int count,
                             RngStream rng) {
  if (count < 2) throw std::invalid_argument("radial_grid: need count >= 2");
  std::vector<Vec> grid;
  grid.reserve(count);
  const int dim = static_cast<int>(center.size());
  for (int i = 0; i < count; ++i) {
    const double r = r_max * static_cast<double>(i) / static_cast<double>(count - 1);
    Vec dir(dim);
    double n2 = 0.0;
    do {
      for (int j = 0; j < dim; ++j) dir[j] = rng.next_gaussian();
      n2 = dir.squaredNorm();
    } while (n2 == 0.0);
    grid.push_back(center + r / std::sqrt(n2) * dir);
  }
  return grid;
}

AuditReport verify_drift(const GdKernel& kernel, const DriftParams& drift,
                         const Vec& center, const std::vector<Vec>& grid,
                         long reps, RngStream rng) {
  if (grid.empty()) throw std::invalid_argument("verify_drift: empty grid");
  if (reps < 1000) throw std::invalid_argument("verify_drift: need reps >= 1000");
  const bool finite_variance = 2.0 * drift.p < kernel.alpha() || kernel.sigma() == 0.0;

  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_allow = 0.0;
  std::vector<double> draws(reps);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    RngStream point_rng = rng.derive(Stream::kGrid).derive(g);
    for (long r = 0; r < reps; ++r) {
      RngStream rep_rng = point_rng.derive(static_cast<std::uint64_t>(r));
      draws[r] = vp(kernel.step(grid[g], rep_rng), center, drift.p);
    }
    const MeanWithAllowance est = heavy_tail_mean(draws, finite_variance);
    const double bound = drift.beta * vp(grid[g], center, drift.p) + drift.H;
    const double margin = bound - est.estimate;
    if (margin + est.allowance < worst_margin + worst_allow) {
      worst_margin = margin;
      worst_allow = est.allowance;
    }
  }
  return AuditReport::from_margins("drift", static_cast<long>(grid.size()),
                                   worst_margin, worst_allow);
}

AuditReport verify_gamma(const LossModel& model, const Dataset& data,
                         const Dataset& neighbor, const KernelIngredients& ing,
                         const Vec& v_center, const Vec& vhat_center,
                         const std::vector<Vec>& grid, long reps, RngStream rng) {
  if (grid.empty()) throw std::invalid_argument("verify_gamma: empty grid");
  const auto grad_a = model.bind_mean_gradient(data);
  const auto grad_b = model.bind_mean_gradient(neighbor);
  const double p = ing.p;
  const double sigma = ing.sigma;
  const double eta = ing.eta;
  const int dim = static_cast<int>(v_center.size());

  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_allow = 0.0;
  std::vector<double> draws(reps);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Vec& theta = grid[g];
    const Vec ga = grad_a(theta);
    const Vec gb = grad_b(theta);
    const double da2 = (theta - eta * ga - v_center).squaredNorm();
    const double db2 = (theta - eta * gb - v_center).squaredNorm();
    RngStream point_rng = rng.derive(Stream::kGrid).derive(g);
    for (long r = 0; r < reps; ++r) {
      RngStream rep_rng = point_rng.derive(static_cast<std::uint64_t>(r));
      const double lambda = ing.alpha == 2.0
                                ? 1.0
                                : sample_subordinator(ing.alpha, rep_rng);
      // The constant chain is built from the statement-convention KL; using
      // it here dominates the calibrated-covariance KL, so the audit checks
      // the harder inequality.
      const double kl = kl_conditional(ga, gb, eta, sigma, lambda,
                                       /*statement_convention=*/true);
      // (1 + E||y - center||^2)^p >= E[(1 + ||y - center||^2)^p] for p <= 1,
      // with the exact conditional mean and covariance 2 lambda sigma^2 I.
      const double ja = std::pow(1.0 + da2 + 2.0 * lambda * sigma * sigma * dim, p);
      const double jb = std::pow(1.0 + db2 + 2.0 * lambda * sigma * sigma * dim, p);
      draws[r] = std::sqrt(2.0 * (ja + jb) * kl);
    }
    const MeanWithAllowance est = heavy_tail_mean(draws, /*finite_variance=*/true);
    const double bound =
        ing.c_gamma * vp(theta, vhat_center, 1.0 + p) / static_cast<double>(ing.n);
    const double margin = bound - est.estimate;
    if (margin + est.allowance < worst_margin + worst_allow) {
      worst_margin = margin;
      worst_allow = est.allowance;
    }
  }
  return AuditReport::from_margins("gamma", static_cast<long>(grid.size()),
                                   worst_margin, worst_allow);
}

namespace {

struct Box {
  Vec lo, hi;
};

Box pooled_box(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Box box;
  box.lo = a.colwise().minCoeff().cwiseMin(b.colwise().minCoeff()).transpose();
  box.hi = a.colwise().maxCoeff().cwiseMax(b.colwise().maxCoeff()).transpose();
  for (Eigen::Index j = 0; j < box.lo.size(); ++j) {
    const double width = box.hi[j] - box.lo[j];
    const double pad = width > 0.0 ? 0.05 * width : 0.5;
    box.lo[j] -= pad;
    box.hi[j] += pad;
  }
  return box;
}

void accumulate_histogram(const Eigen::MatrixXd& s, const Box& box, int bins,
                          std::vector<double>& cells) {
  const int d = static_cast<int>(s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    long idx = 0;
    for (int j = 0; j < d; ++j) {
      const double t = (s(r, j) - box.lo[j]) / (box.hi[j] - box.lo[j]);
      long bj = static_cast<long>(t * bins);
      bj = std::clamp(bj, 0L, static_cast<long>(bins - 1));
      idx = idx * bins + bj;
    }
    cells[idx] += 1.0;
  }
  for (double& c : cells) c /= static_cast<double>(s.rows());
}

}  // namespace

double estimate_tv_histogram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             int bins_per_axis) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw std::invalid_argument("estimate_tv_histogram: empty sample set");
  }
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("estimate_tv_histogram: dimension mismatch");
  }
  if (a.cols() > 3) {
    throw std::invalid_argument("estimate_tv_histogram: only dim <= 3 is supported");
  }
  if (bins_per_axis < 2) {
    throw std::invalid_argument("estimate_tv_histogram: need >= 2 bins per axis");
  }
  const Box box = pooled_box(a, b);
  long total_cells = 1;
  for (Eigen::Index j = 0; j < a.cols(); ++j) total_cells *= bins_per_axis;
  std::vector<double> pa(total_cells, 0.0), pb(total_cells, 0.0);
  accumulate_histogram(a, box, bins_per_axis, pa);
  accumulate_histogram(b, box, bins_per_axis, pb);
  double l1 = 0.0;
  for (long i = 0; i < total_cells; ++i) l1 += std::abs(pa[i] - pb[i]);
  return 0.5 * l1;
}

double split_half_baseline(const Eigen::MatrixXd& a, int bins_per_axis) {
  const Eigen::Index h = a.rows() / 2;
  return estimate_tv_histogram(a.topRows(h), a.bottomRows(a.rows() - h),
                               bins_per_axis);
}

namespace {

Eigen::MatrixXd atan_compactify(const Eigen::MatrixXd& s) {
  return s.array().atan().matrix();
}

double debiased_tv(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int bins) {
  return estimate_tv_histogram(a, b, bins) - split_half_baseline(a, bins);
}

double bootstrap_sd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int bins,
                    int resamples, RngStream rng) {
  std::vector<double> stats(resamples);
  Eigen::MatrixXd ra(a.rows(), a.cols());
  Eigen::MatrixXd rb(b.rows(), b.cols());
  for (int s = 0; s < resamples; ++s) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      ra.row(i) = a.row(static_cast<Eigen::Index>(rng.next_below(a.rows())));
    }
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      rb.row(i) = b.row(static_cast<Eigen::Index>(rng.next_below(b.rows())));
    }
    stats[s] = debiased_tv(ra, rb, bins);
  }
  const double mean = std::accumulate(stats.begin(), stats.end(), 0.0) / resamples;
  double ss = 0.0;
  for (double x : stats) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (resamples - 1));
}

}  // namespace

TvTrendReport verify_tv_stability(
    const LossModel& model,
    const std::function<std::pair<Dataset, Dataset>(int)>& family,
    const ChainConfig& cfg, const std::vector<int>& n_list,
    const std::vector<long>& k_list, long replicas, int bins_per_axis,
    int threads) {
  TvTrendReport report;
  for (long k : k_list) {
    for (int n : n_list) {
      const auto [data, neighbor] = family(n);
      ChainConfig run_cfg = cfg;
      run_cfg.iters = k;
      run_cfg.batch_size = 0;
      const NeighborRun run = run_neighbor_pair(data, neighbor, model, run_cfg,
                                                replicas, /*coupled=*/false, threads);
      const Eigen::MatrixXd a = atan_compactify(run.base);
      const Eigen::MatrixXd b = atan_compactify(run.neighbor);
      TvCell cell;
      cell.n = n;
      cell.k = k;
      cell.tv = estimate_tv_histogram(a, b, bins_per_axis);
      cell.baseline = split_half_baseline(a, bins_per_axis);
      cell.debiased = cell.tv - cell.baseline;
      cell.boot_sd = bootstrap_sd(a, b, bins_per_axis, 32,
                                  RngStream(cfg.seed).derive(Stream::kGrid)
                                      .derive(static_cast<std::uint64_t>(n))
                                      .derive(static_cast<std::uint64_t>(k)));
      report.cells.push_back(cell);
    }
  }

  auto cell_at = [&](int n, long k) -> const TvCell& {
    for (const TvCell& c : report.cells) {
      if (c.n == n && c.k == k) return c;
    }
    throw std::logic_error("verify_tv_stability: missing cell");
  };

  report.nonincreasing_in_n = true;
  for (long k : k_list) {
    for (std::size_t i = 1; i < n_list.size(); ++i) {
      const TvCell& prev = cell_at(n_list[i - 1], k);
      const TvCell& cur = cell_at(n_list[i], k);
      const double allow = 3.0 * std::sqrt(prev.boot_sd * prev.boot_sd +
                                           cur.boot_sd * cur.boot_sd);
      if (cur.debiased > prev.debiased + allow) report.nonincreasing_in_n = false;
    }
  }
  report.stable_in_k = true;
  if (k_list.size() >= 2) {
    for (int n : n_list) {
      const TvCell& first = cell_at(n, k_list.front());
      const TvCell& last = cell_at(n, k_list.back());
      const double allow = 3.0 * std::sqrt(first.boot_sd * first.boot_sd +
                                           last.boot_sd * last.boot_sd);
      if (std::abs(first.debiased - last.debiased) > allow) report.stable_in_k = false;
    }
  }
  report.pass = report.nonincreasing_in_n && report.stable_in_k;
  return report;
}

AuditReport verify_vp_norm_bounds(double p, double alpha, int dim, long trials,
                                  RngStream rng) {
  if (!(p >= 1.0) || !(p < 2.0)) {
    throw std::domain_error("verify_vp_norm_bounds: p must lie in [1, 2)");
  }
  if (!(p < alpha) || !(alpha <= 2.0)) {
    throw std::domain_error("verify_vp_norm_bounds: need p < alpha <= 2");
  }
  constexpr double kSlack = 1e-4;
  constexpr double kStep = 1e-4;

  double worst = std::numeric_limits<double>::infinity();
  for (long t = 0; t < trials; ++t) {
    Vec theta(dim), x(dim);
    for (int j = 0; j < dim; ++j) {
      theta[j] = 3.0 * rng.next_gaussian();
      x[j] = 3.0 * rng.next_gaussian();
    }
    auto value = [&](const Vec& point) {
      return std::pow(1.0 + (point - x).squaredNorm(), p / 2.0);
    };

    Vec grad_fd(dim);
    Eigen::MatrixXd hess_fd(dim, dim);
    for (int i = 0; i < dim; ++i) {
      Vec ei = Vec::Zero(dim);
      ei[i] = kStep;
      grad_fd[i] = (value(theta + ei) - value(theta - ei)) / (2.0 * kStep);
      hess_fd(i, i) =
          (value(theta + ei) - 2.0 * value(theta) + value(theta - ei)) / (kStep * kStep);
      for (int j = i + 1; j < dim; ++j) {
        Vec ej = Vec::Zero(dim);
        ej[j] = kStep;
        const double mixed = (value(theta + ei + ej) - value(theta + ei - ej) -
                              value(theta - ei + ej) + value(theta - ei - ej)) /
                             (4.0 * kStep * kStep);
        hess_fd(i, j) = mixed;
        hess_fd(j, i) = mixed;
      }
    }
    const double dist = (theta - x).norm();
    const double grad_margin =
        p * std::pow(dist, p - 1.0) + kSlack - grad_fd.norm();
    const double hess_margin =
        p * (std::sqrt(static_cast<double>(dim)) + 2.0) + kSlack - hess_fd.norm();
    worst = std::min({worst, grad_margin, hess_margin});
  }
  return AuditReport::from_margins("vp-norm-bounds", trials, worst, 0.0);
}

FalsificationReport falsification_controls(std::uint64_t seed) {
  const double alpha = 1.5;
  const double sigma = 0.5;
  const double lambda = 1.0;
  const double radius = 1.0;
  // Universal-stable-point fixture (zero labels, stable point at the origin):
  // the tightest evaluated chain, so a /100 corruption has nothing to hide
  // behind. A label-only swap on a generic fixture would leave the bound two
  // orders of magnitude slack and the corrupted audit would still pass.
  const RealizableRidgeModel model(lambda, radius);
  Dataset data = make_synthetic_realizable(16, 1, radius, seed);
  data.points[0] << 1.0, 0.0;
  DataPoint swapped(2);
  swapped << 0.05, 0.0;  // feature swap: the gradient gap grows with ||theta||
  const Dataset neighbor = make_neighbor(data, 0, swapped);
  const RegularityConstants consts = model.constants();
  const double eta = 0.5 * step_size_limit(consts.m, consts.K1);
  const double p = default_small_p(alpha);

  const Vec center = *model.universal_stable_point(1);
  const Vec center_hat = center;
  const std::vector<Vec> grid =
      radial_grid(center, 10.0 * stable_point_norm_bound(consts.B, consts.m, consts.K),
                  11, RngStream(seed).derive(Stream::kGrid));

  const GdKernel kernel(data, model, eta, sigma, alpha);
  DriftParams drift = drift_large_p(1.0 + p, alpha, sigma, eta, consts, 1);
  KernelIngredients ing = c_gamma(p, alpha, sigma, eta, consts, 1, data.size());

  FalsificationReport report;
  report.drift_intact =
      verify_drift(kernel, drift, center, grid, 4000, RngStream(seed).derive(1));
  DriftParams broken = drift;
  broken.H /= 100.0;
  report.drift_broken =
      verify_drift(kernel, broken, center, grid, 4000, RngStream(seed).derive(1));
  report.drift_intact.name = "falsification:drift-intact";
  report.drift_broken.name = "falsification:drift-H/100";

  report.gamma_intact = verify_gamma(model, data, neighbor, ing, center,
                                     center_hat, grid, 4000, RngStream(seed).derive(2));
  KernelIngredients corrupted = ing;
  corrupted.c_gamma /= 100.0;
  report.gamma_broken = verify_gamma(model, data, neighbor, corrupted, center,
                                     center_hat, grid, 4000, RngStream(seed).derive(2));
  report.gamma_intact.name = "falsification:gamma-intact";
  report.gamma_broken.name = "falsification:gamma-Cg/100";
  return report;
}

}  // namespace stabledp
