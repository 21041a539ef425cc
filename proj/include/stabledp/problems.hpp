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

#ifndef STABLEDP_PROBLEMS_HPP
#define STABLEDP_PROBLEMS_HPP

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stabledp/audit.hpp"
#include "stabledp/rng.hpp"
#include "stabledp/stable_noise.hpp"

namespace stabledp {

// One record. For ridge regression the vector is the feature a concatenated
// with the label b; for logistic regression it is the label-feature product.
using DataPoint = Eigen::VectorXd;

struct Dataset {
  std::vector<DataPoint> points;
  std::optional<double> diameter_bound;

  int size() const { return static_cast<int>(points.size()); }
  int point_dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

// Constants of the gradient regularity and dissipativity conditions, plus the
// data diameter D and a bound on the norm of the stable point, which together
// feed the privacy accountant.
//   ||grad f(t,x) - grad f(t',x')|| <= K1 ||t - t'|| + K2 ||x - x'|| (||t|| + ||t'|| + 1)
//   <grad f(t1,x) - grad f(t2,x), t1 - t2> >= m ||t1 - t2||^2 - K
//   ||grad f(0,x)|| <= B
struct RegularityConstants {
  double K1 = 0.0;
  double K2 = 0.0;
  double B = 0.0;
  double m = 0.0;
  double K = 0.0;
  double D = 0.0;
  double theta_star_norm = 0.0;
};

// A loss model: per-point gradient oracle plus the metadata (name,
// regularization, data radius) the checkers and the accountant need.
// Implementations are immutable after construction and safe to share across
// threads.
class LossModel {
 public:
  virtual ~LossModel() = default;

  virtual std::string name() const = 0;
  virtual double regularization() const = 0;
  virtual double data_radius() const = 0;
  virtual int param_dim(int point_dim) const = 0;
  virtual int point_dim(int param_dim) const = 0;
  virtual double loss(const Vec& theta, const DataPoint& x) const = 0;
  virtual Vec grad(const Vec& theta, const DataPoint& x) const = 0;
  virtual RegularityConstants constants() const = 0;

  // Set when a single point zeroes the gradient for every admissible record
  // (the realizable construction); otherwise the accountant uses the
  // per-dataset stable points.
  virtual std::optional<Vec> universal_stable_point(int dim) const {
    (void)dim;
    return std::nullopt;
  }

  // Returns a closure computing the dataset-mean gradient. The default
  // averages per-point gradients; models with linear gradient structure
  // override it with precomputed sufficient statistics so a full-batch step
  // costs O(d^2) instead of O(n d).
  virtual std::function<Vec(const Vec&)> bind_mean_gradient(const Dataset& data) const;
};

// Ridge regression, f(theta, (a,b)) = (a'theta - b)^2 / 2 + lambda ||theta||^2 / 2.
class RidgeModel : public LossModel {
 public:
  RidgeModel(double lambda, double radius) : lambda_(lambda), radius_(radius) {
    if (!(lambda > 0.0) || !(radius > 0.0)) {
      throw std::invalid_argument("RidgeModel: lambda and radius must be positive");
    }
  }
  std::string name() const override { return "ridge"; }
  double regularization() const override { return lambda_; }
  double data_radius() const override { return radius_; }
  int param_dim(int point_dim) const override { return point_dim - 1; }
  int point_dim(int param_dim) const override { return param_dim + 1; }
  double loss(const Vec& theta, const DataPoint& x) const override;
  Vec grad(const Vec& theta, const DataPoint& x) const override;
  RegularityConstants constants() const override;
  std::function<Vec(const Vec&)> bind_mean_gradient(const Dataset& data) const override;

 private:
  double lambda_;
  double radius_;
};

// Ridge on a dataset whose labels are identically zero: the origin zeroes
// every per-point gradient, so the universal-stable-point route applies.
class RealizableRidgeModel : public RidgeModel {
 public:
  using RidgeModel::RidgeModel;
  std::string name() const override { return "ridge-realizable"; }
  std::optional<Vec> universal_stable_point(int dim) const override {
    return Vec::Zero(dim);
  }
  RegularityConstants constants() const override {
    RegularityConstants c = RidgeModel::constants();
    c.theta_star_norm = 0.0;  // the universal stable point is the origin
    return c;
  }
};

// Logistic regression on the label-feature product,
// f(theta, x) = log(1 + exp(-x'theta)) + lambda ||theta||^2 / 2.
class LogisticModel : public LossModel {
 public:
  LogisticModel(double lambda, double radius) : lambda_(lambda), radius_(radius) {
    if (!(lambda > 0.0) || !(radius > 0.0)) {
      throw std::invalid_argument("LogisticModel: lambda and radius must be positive");
    }
  }
  std::string name() const override { return "logistic"; }
  double regularization() const override { return lambda_; }
  double data_radius() const override { return radius_; }
  int param_dim(int point_dim) const override { return point_dim; }
  int point_dim(int param_dim) const override { return param_dim; }
  double loss(const Vec& theta, const DataPoint& x) const override;
  Vec grad(const Vec& theta, const DataPoint& x) const override;
  RegularityConstants constants() const override;

 private:
  double lambda_;
  double radius_;
};

Vec ridge_grad(const Vec& theta, const DataPoint& x, double lambda);
Vec logistic_grad(const Vec& theta, const DataPoint& x, double lambda);

// Constants for data bounded by ||x|| <= radius. D defaults to the diameter
// of the data ball (2 radius) and theta_star_norm to the dissipativity bound
// on any stable point; both can be tightened from an actual dataset.
RegularityConstants ridge_constants(double radius, double lambda);
RegularityConstants logistic_constants(double radius, double lambda);

// (B + sqrt(B^2 + 4 m K)) / (2 m): every stable point of the mean loss lies
// inside this radius under the dissipativity condition.
double stable_point_norm_bound(double B, double m, double K);

// Randomized audits of the two regularity conditions. Parameters are drawn
// with log-uniform radii so both the local and the far-field behavior get
// probed; a violation is reported (pass == false), never thrown.
AuditReport check_pseudo_lipschitz(const LossModel& model,
                                   const RegularityConstants& consts, int dim,
                                   long trials, RngStream rng);
AuditReport check_dissipativity(const LossModel& model,
                                const RegularityConstants& consts, int dim,
                                long trials, RngStream rng);

// Exact max pairwise distance for n <= 10^4; for larger n returns the
// guaranteed upper estimate 2 max_i ||x_i - centroid||.
double data_diameter(const Dataset& data);

// Copy with points[index] replaced; the input is untouched.
Dataset make_neighbor(const Dataset& data, int index, const DataPoint& replacement);

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic gradient descent from the origin with the accountant's step
// size until ||mean grad|| <= tol. Throws ConvergenceError after 10^6 steps.
Vec find_stable_point(const LossModel& model, const Dataset& data, double tol);

// Delimited text format: header line `# dim=<d> kind=<ridge|logistic>`, then
// one comma-separated point per line.
Dataset load_dataset(const std::string& path, std::string* kind_out = nullptr);
void save_dataset(const Dataset& data, const std::string& kind, const std::string& path);

// Synthetic data uniform in the ball of the given radius. Ridge points carry
// the label in the last coordinate; the realizable variant zeroes all labels
// so the origin is a universal stable point.
Dataset make_synthetic_ridge(int n, int feature_dim, double radius, std::uint64_t seed);
Dataset make_synthetic_logistic(int n, int dim, double radius, std::uint64_t seed);
Dataset make_synthetic_realizable(int n, int feature_dim, double radius, std::uint64_t seed);

}  // namespace stabledp

#endif  // STABLEDP_PROBLEMS_HPP
