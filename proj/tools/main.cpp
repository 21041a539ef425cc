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
// stabledp: heavy-tailed noisy (S)GD with an explicit (0, delta) privacy
// accountant and Monte-Carlo verification suites.
//
// Subcommands: sample | constants | budget | train | verify.
// Exit codes: 0 success / all audits pass, 1 validation error, 2 runtime
// divergence, 3 audit failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "stabledp/accountant.hpp"
#include "stabledp/config.hpp"
#include "stabledp/optimizer.hpp"
#include "stabledp/problems.hpp"
#include "stabledp/report.hpp"
#include "stabledp/stable_noise.hpp"
#include "stabledp/verifier.hpp"

namespace stabledp {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitAuditFailure = 3;

struct Context {
  Config cfg;
  std::string out_dir;
  std::string hash;
  int threads = 1;

  std::string path(const std::string& name) const { return out_dir + "/" + name; }
};

std::unique_ptr<LossModel> make_model(const Config& cfg) {
  const std::string kind = cfg.get_string("model.kind", "ridge");
  const double lambda = cfg.get_double("model.lambda", 0.5);
  const double radius = cfg.get_double("model.radius", 1.0);
  if (kind == "ridge") return std::make_unique<RidgeModel>(lambda, radius);
  if (kind == "ridge-realizable") {
    return std::make_unique<RealizableRidgeModel>(lambda, radius);
  }
  if (kind == "logistic") return std::make_unique<LogisticModel>(lambda, radius);
  throw ConfigError("model.kind must be ridge, ridge-realizable, or logistic");
}

Dataset make_dataset(const Config& cfg, const LossModel& model, int dim) {
  const std::string source = cfg.get_string("dataset.source", "synthetic");
  if (source == "file") {
    Dataset data = load_dataset(cfg.get_string("dataset.path"));
    const double radius = model.data_radius();
    for (const DataPoint& x : data.points) {
      if (x.norm() > radius * (1.0 + 1e-12)) {
        throw ConfigError("dataset point outside the declared radius " +
                          std::to_string(radius));
      }
    }
    return data;
  }
  if (source != "synthetic") throw ConfigError("dataset.source must be synthetic or file");
  const int n = static_cast<int>(cfg.get_long("dataset.n", 128));
  if (n < 1) throw ConfigError("dataset.n must be >= 1");
  const std::uint64_t seed = cfg.get_u64("dataset.seed", 1);
  const double radius = model.data_radius();
  if (model.name() == "logistic") return make_synthetic_logistic(n, dim, radius, seed);
  if (model.name() == "ridge-realizable") {
    return make_synthetic_realizable(n, dim, radius, seed);
  }
  return make_synthetic_ridge(n, dim, radius, seed);
}

ChainConfig make_chain_config(const Config& cfg) {
  ChainConfig chain;
  chain.eta = cfg.get_double("chain.eta", 0.05);
  chain.sigma = cfg.get_double("chain.sigma", 0.5);
  chain.alpha = cfg.get_double("chain.alpha", 1.5);
  chain.batch_size = static_cast<int>(cfg.get_long("chain.batch", 0));
  chain.iters = cfg.get_long("chain.iters", 100);
  chain.seed = cfg.get_u64("chain.seed", 1);
  chain.record_stride = cfg.get_long("chain.record_stride", 0);
  const std::string init = cfg.get_string("chain.init", "stable-point");
  if (init == "zero") {
    chain.init = InitPolicy::kZero;
  } else if (init == "stable-point") {
    chain.init = InitPolicy::kStablePoint;
  } else {
    throw ConfigError("chain.init must be zero or stable-point");
  }
  return chain;
}

BudgetInputs make_budget_inputs(const Config& cfg, const LossModel& model, int dim) {
  BudgetInputs in;
  in.alpha = cfg.get_double("chain.alpha", 1.5);
  in.sigma = cfg.get_double("chain.sigma", 0.5);
  in.consts = model.constants();
  in.eta = cfg.get_double("chain.eta", 0.25 * step_size_limit(in.consts.m, in.consts.K1));
  in.dim = dim;
  in.n = cfg.get_long("dataset.n", 128);
  in.k = cfg.get_long("accountant.k", 1000);
  in.p = cfg.get_double("accountant.p", default_small_p(in.alpha));
  in.assumption3 = cfg.get_bool("accountant.assumption3",
                                model.universal_stable_point(dim).has_value());
  in.algorithm = cfg.get_string("accountant.algorithm", "gd") == "sgd"
                     ? Algorithm::kStochasticGradientDescent
                     : Algorithm::kGradientDescent;
  const double rho = cfg.get_double("accountant.rho", 0.0);
  if (rho > 0.0) {
    in.erg = ErgodicityParams{cfg.get_double("accountant.c", 1.0), rho, false};
  }
  return in;
}

int cmd_sample(const Context& ctx) {
  const double alpha = ctx.cfg.get_double("chain.alpha");
  const double sigma = ctx.cfg.get_double("chain.sigma", 1.0);
  const int dim = static_cast<int>(ctx.cfg.get_long("model.dim", 1));
  const long n_draws = ctx.cfg.get_long("sample.n_draws", 100000);
  const StableSpec spec{alpha, sigma, dim};
  spec.validate();

  RngStream rng(ctx.cfg.get_u64("chain.seed", 1));
  Eigen::MatrixXd draws(n_draws, dim);
  {
    std::vector<std::string> cols;
    for (int j = 0; j < dim; ++j) cols.push_back("x" + std::to_string(j));
    CsvWriter csv(ctx.path("draws.csv"), ctx.hash, cols);
    std::vector<double> row(dim);
    for (long i = 0; i < n_draws; ++i) {
      const Vec xi = sample_stable_vector(spec, rng);
      for (int j = 0; j < dim; ++j) row[j] = xi[j];
      draws.row(i) = xi.transpose();
      csv.row(row);
    }
  }

  // Characteristic-function audit over 20 directions.
  CsvWriter audit(ctx.path("ecf_audit.csv"), ctx.hash,
                  {"direction", "norm", "ecf", "target", "abs_error", "pass"});
  RngStream dir_rng(ctx.cfg.get_u64("chain.seed", 1) + 1);
  bool all_pass = true;
  for (int t = 0; t < 20; ++t) {
    Vec u(dim);
    for (int j = 0; j < dim; ++j) u[j] = dir_rng.next_gaussian();
    u.normalize();
    const double norms[3] = {0.5, 1.0, 2.0};
    const double norm = norms[t % 3];
    u *= norm;
    double acc = 0.0;
    for (long i = 0; i < n_draws; ++i) acc += std::cos(u.dot(draws.row(i).transpose()));
    const double ecf = acc / static_cast<double>(n_draws);
    const double target = std::exp(-std::pow(norm, alpha));
    const double err = std::abs(ecf - target);
    const bool pass = err <= 0.01 + 3.0 / std::sqrt(static_cast<double>(n_draws));
    all_pass = all_pass && pass;
    audit.row({static_cast<double>(t), norm, ecf, target, err, pass ? 1.0 : 0.0});
  }
  std::cout << (all_pass ? "ecf audit: pass\n" : "ecf audit: FAIL\n");
  return all_pass ? kExitOk : kExitAuditFailure;
}

int cmd_constants(const Context& ctx) {
  const auto model = make_model(ctx.cfg);
  const int dim = static_cast<int>(ctx.cfg.get_long("model.dim", 1));
  const BudgetInputs in = make_budget_inputs(ctx.cfg, *model, dim);

  std::vector<std::pair<std::string, double>> items;
  items.emplace_back("K1", in.consts.K1);
  items.emplace_back("K2", in.consts.K2);
  items.emplace_back("B", in.consts.B);
  items.emplace_back("m", in.consts.m);
  items.emplace_back("K", in.consts.K);
  items.emplace_back("D", in.consts.D);
  items.emplace_back("theta_star_norm", in.consts.theta_star_norm);
  items.emplace_back("step_size_limit", step_size_limit(in.consts.m, in.consts.K1));
  const DriftParams small = drift_small_p(in.p, in.alpha, in.sigma, in.eta, in.consts, dim);
  items.emplace_back("beta_small_p", small.beta);
  items.emplace_back("H_small_p", small.H);
  const DriftParams large =
      drift_large_p(1.0 + in.p, in.alpha, in.sigma, in.eta, in.consts, dim);
  items.emplace_back("beta_1p", large.beta);
  items.emplace_back("H_1p", large.H);
  const KernelIngredients kernel =
      in.assumption3 ? c_gamma(in.p, in.alpha, in.sigma, in.eta, in.consts, dim, in.n)
                     : c_gamma_hat(in.p, in.alpha, in.sigma, in.eta, in.consts, dim, in.n);
  items.emplace_back("assumption3", kernel.assumption3 ? 1.0 : 0.0);
  items.emplace_back("C1", kernel.C1);
  items.emplace_back("C2", kernel.C2);
  items.emplace_back("C3", kernel.C3);
  items.emplace_back("C4", kernel.C4);
  items.emplace_back("C5", kernel.C5);
  items.emplace_back("C6", kernel.C6);
  items.emplace_back("C7", kernel.C7);
  items.emplace_back("chi_moment", kernel.chi_moment);
  items.emplace_back("center_offset", kernel.center_offset);
  items.emplace_back("c_gamma", kernel.c_gamma);
  write_key_values(ctx.path("constants.txt"), ctx.hash, items);
  std::cout << "constants written to " << ctx.path("constants.txt") << "\n";
  return kExitOk;
}

int cmd_budget(const Context& ctx) {
  const auto model = make_model(ctx.cfg);
  const int dim = static_cast<int>(ctx.cfg.get_long("model.dim", 1));
  BudgetInputs in = make_budget_inputs(ctx.cfg, *model, dim);

  const PrivacyBudget budget = compute_budget(in);
  write_key_values(ctx.path("budget.txt"), ctx.hash, budget.ingredients);

  // n-sweep: delta * n is an exact invariant of the bound.
  {
    CsvWriter csv(ctx.path("budget_n_sweep.csv"), ctx.hash,
                  {"n", "delta", "delta_times_n", "delta_normalized"});
    for (long n : ctx.cfg.get_long_list("sweep.n_list", {100, 1000, 10000})) {
      BudgetInputs swept = in;
      swept.n = n;
      const PrivacyBudget b = compute_budget(swept);
      csv.row({static_cast<double>(n), b.delta, b.delta_times_n, b.delta_normalized});
    }
  }

  // d-sweep of the drift offset with the fitted log-log slope.
  {
    std::vector<int> dims;
    for (long d : ctx.cfg.get_long_list("sweep.d_list",
                                        {64, 128, 256, 512, 1024, 2048, 4096})) {
      dims.push_back(static_cast<int>(d));
    }
    RegularityConstants sweep_consts = in.consts;
    sweep_consts.m = ctx.cfg.get_double("sweep.m", in.consts.m);
    const double sweep_sigma = ctx.cfg.get_double("sweep.sigma", in.sigma);
    const double sweep_eta = ctx.cfg.get_double("sweep.eta", in.eta);
    const DimScalingReport report = dimension_scaling_report(
        in.alpha, in.p, dims, sweep_sigma, sweep_eta, sweep_consts);
    CsvWriter csv(ctx.path("budget_d_sweep.csv"), ctx.hash,
                  {"d", "H_1p", "fitted_slope", "asymptotic_slope"});
    for (std::size_t i = 0; i < dims.size(); ++i) {
      csv.row({static_cast<double>(dims[i]), report.H[i], report.fitted_slope,
               report.asymptotic_slope});
    }
    std::cout << "delta = " << budget.delta << " (delta*n = " << budget.delta_times_n
              << "; (c, rho) heuristic unless accountant.rho is set, "
                 "NON-RIGOROUS)\n"
              << "d-sweep fitted slope = " << report.fitted_slope << " (asymptotic "
              << report.asymptotic_slope << ")\n";
  }
  return kExitOk;
}

int cmd_train(const Context& ctx) {
  const auto model = make_model(ctx.cfg);
  const int dim = static_cast<int>(ctx.cfg.get_long("model.dim", 1));
  const Dataset data = make_dataset(ctx.cfg, *model, dim);
  ChainConfig chain = make_chain_config(ctx.cfg);
  chain.validate(data.size());
  const long replicas = ctx.cfg.get_long("verifier.replicas", 1);

  const Eigen::MatrixXd finals = run_replicas(data, *model, chain, replicas, ctx.threads);
  {
    std::vector<std::string> cols{"replica"};
    for (int j = 0; j < finals.cols(); ++j) cols.push_back("theta" + std::to_string(j));
    CsvWriter csv(ctx.path("final_states.csv"), ctx.hash, cols);
    std::vector<double> row(1 + finals.cols());
    for (long r = 0; r < finals.rows(); ++r) {
      row[0] = static_cast<double>(r);
      for (int j = 0; j < finals.cols(); ++j) row[1 + j] = finals(r, j);
      csv.row(row);
    }
  }

  if (chain.record_stride > 0) {
    const Trajectory traj = run_chain(data, *model, chain);
    const auto mean_grad = model->bind_mean_gradient(data);
    std::vector<std::string> cols{"step"};
    for (int j = 0; j < finals.cols(); ++j) cols.push_back("theta" + std::to_string(j));
    cols.push_back("grad_norm");
    CsvWriter csv(ctx.path("trajectory.csv"), ctx.hash, cols);
    for (const ChainState& s : traj.recorded) {
      std::vector<double> row{static_cast<double>(s.step_index)};
      for (int j = 0; j < s.theta.size(); ++j) row.push_back(s.theta[j]);
      row.push_back(mean_grad(s.theta).norm());
      csv.row(row);
    }
  }
  std::cout << "trained " << replicas << " replica(s), " << chain.iters << " steps each\n";
  return kExitOk;
}

int cmd_verify(const Context& ctx) {
  const auto model = make_model(ctx.cfg);
  const int dim = static_cast<int>(ctx.cfg.get_long("model.dim", 1));
  const Dataset data = make_dataset(ctx.cfg, *model, dim);
  const std::string suites = ctx.cfg.get_string("verifier.suites", "drift,gamma,vpnorm");
  const std::uint64_t seed = ctx.cfg.get_u64("verifier.seed", 99);
  const long reps = ctx.cfg.get_long("verifier.reps", 4000);
  const int grid_points = static_cast<int>(ctx.cfg.get_long("verifier.grid_points", 21));
  const double grid_factor = ctx.cfg.get_double("verifier.grid_radius_factor", 10.0);

  const double alpha = ctx.cfg.get_double("chain.alpha", 1.5);
  const double sigma = ctx.cfg.get_double("chain.sigma", 0.5);
  const RegularityConstants consts = model->constants();
  const double eta =
      ctx.cfg.get_double("chain.eta", 0.25 * step_size_limit(consts.m, consts.K1));
  const double p = ctx.cfg.get_double("accountant.p", default_small_p(alpha));

  auto wants = [&suites](const char* name) {
    return suites.find(name) != std::string::npos;
  };

  std::vector<AuditReport> reports;
  if (wants("drift") || wants("gamma")) {
    const Vec center = find_stable_point(*model, data, 1e-10);
    const auto grid = radial_grid(
        center, grid_factor * stable_point_norm_bound(consts.B, consts.m, consts.K),
        grid_points, RngStream(seed).derive(Stream::kGrid));
    if (wants("drift")) {
      const GdKernel kernel(data, *model, eta, sigma, alpha);
      auto small = verify_drift(kernel, drift_small_p(p, alpha, sigma, eta, consts, dim),
                                center, grid, reps, RngStream(seed).derive(1));
      small.name = "drift-small-p:" + model->name();
      reports.push_back(small);
      auto large =
          verify_drift(kernel, drift_large_p(1.0 + p, alpha, sigma, eta, consts, dim),
                       center, grid, reps, RngStream(seed).derive(2));
      large.name = "drift-large-p:" + model->name();
      reports.push_back(large);
    }
    if (wants("gamma")) {
      const DataPoint swapped = data.points[0] * (-0.5);
      const Dataset neighbor = make_neighbor(data, 0, swapped);
      const Vec center_hat = find_stable_point(*model, neighbor, 1e-10);
      const auto star = model->universal_stable_point(dim);
      const KernelIngredients ing =
          star.has_value() ? c_gamma(p, alpha, sigma, eta, consts, dim, data.size())
                           : c_gamma_hat(p, alpha, sigma, eta, consts, dim, data.size());
      auto gamma = verify_gamma(*model, data, neighbor, ing, star.value_or(center),
                                star.value_or(center_hat), grid, reps,
                                RngStream(seed).derive(3));
      gamma.name = "gamma:" + model->name();
      reports.push_back(gamma);
    }
  }
  if (wants("vpnorm")) {
    reports.push_back(verify_vp_norm_bounds(std::min(1.0 + p, alpha - 0.01), alpha, dim,
                                            1000, RngStream(seed).derive(4)));
  }
  bool controls_ok = true;
  if (wants("falsification")) {
    const FalsificationReport f = falsification_controls(seed);
    reports.push_back(f.drift_intact);
    AuditReport broken_drift = f.drift_broken;
    broken_drift.pass = !f.drift_broken.pass;  // the control is expected to fail
    reports.push_back(broken_drift);
    reports.push_back(f.gamma_intact);
    AuditReport broken_gamma = f.gamma_broken;
    broken_gamma.pass = !f.gamma_broken.pass;
    reports.push_back(broken_gamma);
    controls_ok = f.ok();
  }

  CsvWriter csv(ctx.path("audits.csv"), ctx.hash,
                {"name", "checked_points", "worst_margin", "ci_width", "pass"});
  bool all_pass = controls_ok;
  for (const AuditReport& r : reports) {
    csv.raw_row(to_csv_row(r));
    std::cout << to_summary_line(r) << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitAuditFailure;
}

int run(int argc, char** argv) {
  CLI::App app{"heavy-tailed noisy (S)GD, explicit privacy budgets, and "
               "Monte-Carlo verification"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_override = 0;
  int threads = 1;
  app.add_option("--config", config_path, "configuration file (INI-like)");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed_override, "override chain.seed");
  app.add_option("--threads", threads, "worker cap (does not affect results)");

  auto* sample = app.add_subcommand("sample", "draw stable noise and audit its law");
  auto* constants =
      app.add_subcommand("constants", "evaluate regularity and kernel constants");
  auto* budget = app.add_subcommand("budget", "compute the (0, delta) privacy budget");
  auto* train = app.add_subcommand("train", "run noisy (S)GD replicas");
  auto* verify = app.add_subcommand("verify", "run Monte-Carlo audit suites");
  for (CLI::App* sub : {sample, constants, budget, train, verify}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitValidation;
  }

  Context ctx{config_path.empty() ? Config{} : Config::from_file(config_path), out_dir,
              "", std::max(1, threads)};
  if (seed_opt->count() > 0) {
    ctx.cfg.override_value("chain.seed", std::to_string(seed_override));
  }
  ctx.hash = config_hash_hex(ctx.cfg.canonical_text());
  std::filesystem::create_directories(out_dir);

  if (sample->parsed()) return cmd_sample(ctx);
  if (constants->parsed()) return cmd_constants(ctx);
  if (budget->parsed()) return cmd_budget(ctx);
  if (train->parsed()) return cmd_train(ctx);
  if (verify->parsed()) return cmd_verify(ctx);
  return kExitValidation;
}

}  // namespace
}  // namespace stabledp

int main(int argc, char** argv) {
  try {
    return stabledp::run(argc, argv);
  } catch (const stabledp::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const stabledp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
