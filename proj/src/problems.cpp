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

#include "stabledp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace stabledp {

namespace {

// 1 / (1 + exp(s)) without overflow.
double sigmoid_neg(double s) {
  if (s >= 0.0) {
    const double e = std::exp(-s);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(s));
}

Vec random_direction(int dim, RngStream& rng) {
  Vec v(dim);
  double n2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.next_gaussian();
    n2 = v.squaredNorm();
  } while (n2 == 0.0);
  return v / std::sqrt(n2);
}

Vec uniform_in_ball(int dim, double radius, RngStream& rng) {
  const double r = radius * std::pow(rng.next_open(), 1.0 / dim);
  return r * random_direction(dim, rng);
}

// Log-uniform radius over [1e-3, 1e3] so audits probe several scales.
Vec log_uniform_point(int dim, RngStream& rng) {
  const double r = std::exp(std::log(1e-3) + rng.next_double() * std::log(1e6));
  return r * random_direction(dim, rng);
}

}  // namespace

std::function<Vec(const Vec&)> LossModel::bind_mean_gradient(const Dataset& data) const {
  if (data.size() == 0) {
    throw std::invalid_argument("bind_mean_gradient: empty dataset");
  }
  const Dataset* d = &data;
  const LossModel* self = this;
  return [d, self](const Vec& theta) {
    Vec g = Vec::Zero(theta.size());
    for (const DataPoint& x : d->points) g += self->grad(theta, x);
    return Vec(g / static_cast<double>(d->size()));
  };
}

Vec ridge_grad(const Vec& theta, const DataPoint& x, double lambda) {
  if (x.size() != theta.size() + 1) {
    throw std::invalid_argument("ridge_grad: point must be (feature, label) with feature dim matching theta");
  }
  const auto a = x.head(theta.size());
  const double b = x[x.size() - 1];
  return a * (a.dot(theta) - b) + lambda * theta;
}

Vec logistic_grad(const Vec& theta, const DataPoint& x, double lambda) {
  if (x.size() != theta.size()) {
    throw std::invalid_argument("logistic_grad: point dim must match theta");
  }
  return -sigmoid_neg(x.dot(theta)) * x + lambda * theta;
}

double RidgeModel::loss(const Vec& theta, const DataPoint& x) const {
  const auto a = x.head(theta.size());
  const double r = a.dot(theta) - x[x.size() - 1];
  return 0.5 * r * r + 0.5 * regularization() * theta.squaredNorm();
}

Vec RidgeModel::grad(const Vec& theta, const DataPoint& x) const {
  return ridge_grad(theta, x, regularization());
}

RegularityConstants RidgeModel::constants() const {
  return ridge_constants(data_radius(), regularization());
}

std::function<Vec(const Vec&)> RidgeModel::bind_mean_gradient(const Dataset& data) const {
  if (data.size() == 0) {
    throw std::invalid_argument("bind_mean_gradient: empty dataset");
  }
  const int d = param_dim(data.point_dim());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  Vec cross = Vec::Zero(d);
  for (const DataPoint& x : data.points) {
    const auto a = x.head(d);
    gram.noalias() += a * a.transpose();
    cross.noalias() += x[d] * a;
  }
  gram /= static_cast<double>(data.size());
  cross /= static_cast<double>(data.size());
  const double lambda = regularization();
  return [gram, cross, lambda](const Vec& theta) {
    return Vec(gram * theta - cross + lambda * theta);
  };
}

double LogisticModel::loss(const Vec& theta, const DataPoint& x) const {
  const double s = x.dot(theta);
  const double nll = s > 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
  return nll + 0.5 * lambda_ * theta.squaredNorm();
}

Vec LogisticModel::grad(const Vec& theta, const DataPoint& x) const {
  return logistic_grad(theta, x, lambda_);
}

RegularityConstants LogisticModel::constants() const {
  return logistic_constants(radius_, lambda_);
}

RegularityConstants ridge_constants(double radius, double lambda) {
  if (!(radius > 0.0) || !(lambda > 0.0)) {
    throw std::domain_error("ridge_constants: radius and lambda must be positive");
  }
  RegularityConstants c;
  c.K1 = radius * radius + lambda;
  c.K2 = 2.0 * radius;
  c.B = radius * radius;
  c.m = lambda;
  c.K = 0.0;
  c.D = 2.0 * radius;
  c.theta_star_norm = stable_point_norm_bound(c.B, c.m, c.K);
  return c;
}

RegularityConstants logistic_constants(double radius, double lambda) {
  if (!(radius > 0.0) || !(lambda > 0.0)) {
    throw std::domain_error("logistic_constants: radius and lambda must be positive");
  }
  RegularityConstants c;
  c.K1 = radius * radius + lambda;
  c.K2 = std::max(1.0, radius);
  c.B = radius / 2.0;
  c.m = lambda;
  c.K = 0.0;
  c.D = 2.0 * radius;
  c.theta_star_norm = stable_point_norm_bound(c.B, c.m, c.K);
  return c;
}

double stable_point_norm_bound(double B, double m, double K) {
  if (!(m > 0.0) || B < 0.0 || K < 0.0) {
    throw std::domain_error("stable_point_norm_bound: need m > 0, B >= 0, K >= 0");
  }
  return (B + std::sqrt(B * B + 4.0 * m * K)) / (2.0 * m);
}

AuditReport check_pseudo_lipschitz(const LossModel& model,
                                   const RegularityConstants& consts, int dim,
                                   long trials, RngStream rng) {
  const int point_dim = model.point_dim(dim);
  double worst = 0.0;
  for (long t = 0; t < trials; ++t) {
    const Vec theta = log_uniform_point(dim, rng);
    const Vec theta_hat = log_uniform_point(dim, rng);
    const DataPoint x = uniform_in_ball(point_dim, model.data_radius(), rng);
    const DataPoint x_hat = uniform_in_ball(point_dim, model.data_radius(), rng);
    const double denom =
        consts.K1 * (theta - theta_hat).norm() +
        consts.K2 * (x - x_hat).norm() * (theta.norm() + theta_hat.norm() + 1.0);
    if (denom == 0.0) continue;
    const double ratio = (model.grad(theta, x) - model.grad(theta_hat, x_hat)).norm() / denom;
    worst = std::max(worst, ratio);
  }
  return AuditReport::from_margins("pseudo-lipschitz:" + model.name(), trials,
                                   1.0 + 1e-9 - worst, 0.0);
}

AuditReport check_dissipativity(const LossModel& model,
                                const RegularityConstants& consts, int dim,
                                long trials, RngStream rng) {
  const int point_dim = model.point_dim(dim);
  double worst = std::numeric_limits<double>::infinity();
  const Vec zero = Vec::Zero(dim);
  for (long t = 0; t < trials; ++t) {
    const Vec t1 = log_uniform_point(dim, rng);
    const Vec t2 = log_uniform_point(dim, rng);
    const DataPoint x = uniform_in_ball(point_dim, model.data_radius(), rng);
    const Vec dg = model.grad(t1, x) - model.grad(t2, x);
    const Vec dt = t1 - t2;
    // Normalized by 1 + ||dt||^2 so far-field trials do not dominate the
    // reported margin; the sign (and hence pass/fail) is unchanged.
    const double inner_margin =
        (dg.dot(dt) - consts.m * dt.squaredNorm() + consts.K) / (1.0 + dt.squaredNorm());
    const double grad0_margin = consts.B - model.grad(zero, x).norm();
    worst = std::min({worst, inner_margin, grad0_margin});
  }
  // Same numerical allowance as the ratio audit: the inner product cancels
  // two large terms, so exact-zero margins land at +-1e-16.
  return AuditReport::from_margins("dissipativity:" + model.name(), trials,
                                   worst, 1e-9);
}

double data_diameter(const Dataset& data) {
  const int n = data.size();
  if (n < 2) throw std::invalid_argument("data_diameter: need at least two points");
  if (n <= 10000) {
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        best = std::max(best, (data.points[i] - data.points[j]).squaredNorm());
      }
    }
    return std::sqrt(best);
  }
  // Guaranteed upper estimate via the centroid: diam <= 2 max_i ||x_i - c||.
  Vec c = Vec::Zero(data.point_dim());
  for (const DataPoint& x : data.points) c += x;
  c /= static_cast<double>(n);
  double worst = 0.0;
  for (const DataPoint& x : data.points) worst = std::max(worst, (x - c).norm());
  return 2.0 * worst;
}

Dataset make_neighbor(const Dataset& data, int index, const DataPoint& replacement) {
  if (index < 0 || index >= data.size()) {
    throw std::out_of_range("make_neighbor: index out of range");
  }
  if (replacement.size() != data.point_dim()) {
    throw std::invalid_argument("make_neighbor: replacement dimension mismatch");
  }
  Dataset out = data;
  out.points[index] = replacement;
  return out;
}

Vec find_stable_point(const LossModel& model, const Dataset& data, double tol) {
  if (!(tol > 0.0)) throw std::domain_error("find_stable_point: tol must be positive");
  const RegularityConstants c = model.constants();
  const double eta = std::min({c.m / (2.0 * c.K1 * c.K1), 1.0 / c.m, 1.0});
  const auto mean_grad = model.bind_mean_gradient(data);
  Vec theta = Vec::Zero(model.param_dim(data.point_dim()));
  for (long it = 0; it < 1000000; ++it) {
    const Vec g = mean_grad(theta);
    if (g.norm() <= tol) return theta;
    theta -= eta * g;
  }
  throw ConvergenceError("find_stable_point: iteration cap exceeded");
}

Dataset load_dataset(const std::string& path, std::string* kind_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
  std::string header;
  std::getline(in, header);
  int dim = 0;
  std::string kind;
  {
    std::istringstream hs(header);
    std::string hash, tok;
    hs >> hash;
    if (hash != "#") throw std::runtime_error("load_dataset: missing `# dim=... kind=...` header");
    while (hs >> tok) {
      if (tok.rfind("dim=", 0) == 0) dim = std::stoi(tok.substr(4));
      else if (tok.rfind("kind=", 0) == 0) kind = tok.substr(5);
      else throw std::runtime_error("load_dataset: unknown header token `" + tok + "`");
    }
  }
  if (dim < 1) throw std::runtime_error("load_dataset: bad or missing dim in header");
  if (kind != "ridge" && kind != "logistic") {
    throw std::runtime_error("load_dataset: kind must be ridge or logistic");
  }
  if (kind_out != nullptr) *kind_out = kind;

  Dataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DataPoint x(dim);
    std::istringstream ls(line);
    std::string cell;
    for (int i = 0; i < dim; ++i) {
      if (!std::getline(ls, cell, ',')) {
        throw std::runtime_error("load_dataset: short row in " + path);
      }
      x[i] = std::stod(cell);
      if (!std::isfinite(x[i])) throw std::runtime_error("load_dataset: non-finite value");
    }
    if (std::getline(ls, cell, ',')) {
      throw std::runtime_error("load_dataset: extra columns in " + path);
    }
    data.points.push_back(std::move(x));
  }
  return data;
}

void save_dataset(const Dataset& data, const std::string& kind, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  out << "# dim=" << data.point_dim() << " kind=" << kind << "\n";
  out.precision(17);
  for (const DataPoint& x : data.points) {
    for (int i = 0; i < x.size(); ++i) out << (i ? "," : "") << x[i];
    out << "\n";
  }
}

Dataset make_synthetic_ridge(int n, int feature_dim, double radius, std::uint64_t seed) {
  Dataset data;
  RngStream rng = RngStream(seed).derive(Stream::kData);
  for (int i = 0; i < n; ++i) {
    data.points.push_back(uniform_in_ball(feature_dim + 1, radius, rng));
  }
  data.diameter_bound = 2.0 * radius;
  return data;
}

Dataset make_synthetic_logistic(int n, int dim, double radius, std::uint64_t seed) {
  Dataset data;
  RngStream rng = RngStream(seed).derive(Stream::kData);
  for (int i = 0; i < n; ++i) {
    data.points.push_back(uniform_in_ball(dim, radius, rng));
  }
  data.diameter_bound = 2.0 * radius;
  return data;
}

Dataset make_synthetic_realizable(int n, int feature_dim, double radius, std::uint64_t seed) {
  Dataset data;
  RngStream rng = RngStream(seed).derive(Stream::kData);
  for (int i = 0; i < n; ++i) {
    DataPoint x(feature_dim + 1);
    x.head(feature_dim) = uniform_in_ball(feature_dim, radius, rng);
    x[feature_dim] = 0.0;  // zero labels: the origin zeroes every gradient
    data.points.push_back(std::move(x));
  }
  data.diameter_bound = 2.0 * radius;
  return data;
}

}  // namespace stabledp
