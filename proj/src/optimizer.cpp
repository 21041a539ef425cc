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

#include "stabledp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "stabledp/stable_noise.hpp"

namespace stabledp {

void ChainConfig::validate(int n) const {
  if (!(eta >= 0.0)) throw std::domain_error("ChainConfig: eta must be >= 0");
  if (!(sigma >= 0.0)) throw std::domain_error("ChainConfig: sigma must be >= 0");
  if (!(alpha > 1.0) || !(alpha <= 2.0)) {
    throw std::domain_error("ChainConfig: alpha must lie in (1, 2]");
  }
  if (batch_size < 0 || batch_size > n) {
    throw std::domain_error("ChainConfig: batch_size must lie in [1, n] (0 = full batch)");
  }
  if (iters < 0) throw std::domain_error("ChainConfig: iters must be >= 0");
  if (init == InitPolicy::kFixedVector && init_vector.size() == 0) {
    throw std::domain_error("ChainConfig: fixed init requires init_vector");
  }
}

std::vector<int> sample_batch(int n, int b, RngStream& rng) {
  if (b < 1 || b > n) throw std::domain_error("sample_batch: need 1 <= b <= n");
  std::vector<int> out;
  out.reserve(b);
  if (b == n) {
    for (int i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  // Floyd's algorithm: uniform over size-b subsets in O(b) draws.
  for (int j = n - b; j < n; ++j) {
    const int t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
    if (std::find(out.begin(), out.end(), t) != out.end()) {
      out.push_back(j);
    } else {
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

ChainState step_impl(const ChainState& state, const Dataset& data,
                     const LossModel& model, const ChainConfig& cfg,
                     const std::function<Vec(const Vec&)>& mean_grad,
                     RngStream step_stream, long replica) {
  const int n = data.size();
  const int b = cfg.effective_batch(n);
  const int d = static_cast<int>(state.theta.size());

  Vec g;
  if (b == n) {
    g = mean_grad(state.theta);
  } else {
    RngStream batch_stream = step_stream.derive(Stream::kBatch);
    const std::vector<int> batch = sample_batch(n, b, batch_stream);
    g = Vec::Zero(d);
    for (int i : batch) g += model.grad(state.theta, data.points[i]);
    g /= static_cast<double>(b);
  }

  ChainState next;
  next.theta = state.theta - cfg.eta * g;
  if (cfg.sigma > 0.0) {
    RngStream noise_stream = step_stream.derive(Stream::kNoise);
    const StableSpec spec{cfg.alpha, cfg.sigma, d};
    next.theta += cfg.sigma * sample_stable_vector(spec, noise_stream);
  }
  next.step_index = state.step_index + 1;
  if (!next.theta.allFinite()) throw DivergenceError(next.step_index, replica);
  return next;
}

Vec initial_point(const Dataset& data, const LossModel& model, const ChainConfig& cfg) {
  const int d = model.param_dim(data.point_dim());
  switch (cfg.init) {
    case InitPolicy::kZero:
      return Vec::Zero(d);
    case InitPolicy::kStablePoint: {
      if (auto star = model.universal_stable_point(d)) return *star;
      return find_stable_point(model, data, 1e-10);
    }
    case InitPolicy::kFixedVector:
      if (cfg.init_vector.size() != d) {
        throw std::invalid_argument("ChainConfig: init_vector dimension mismatch");
      }
      return cfg.init_vector;
  }
  throw std::logic_error("unreachable init policy");
}

}  // namespace

ChainState sgd_step(const ChainState& state, const Dataset& data,
                    const LossModel& model, const ChainConfig& cfg,
                    RngStream step_stream) {
  cfg.validate(data.size());
  const auto mean_grad = model.bind_mean_gradient(data);
  return step_impl(state, data, model, cfg, mean_grad, step_stream, 0);
}

Trajectory run_chain(const Dataset& data, const LossModel& model,
                     const ChainConfig& cfg, long replica,
                     std::uint64_t chain_tag) {
  cfg.validate(data.size());
  const auto mean_grad = model.bind_mean_gradient(data);

  const RngStream chain_stream = RngStream(cfg.seed)
                                     .derive(Stream::kChain)
                                     .derive(chain_tag)
                                     .derive(static_cast<std::uint64_t>(replica));
  Trajectory traj;
  ChainState state{initial_point(data, model, cfg), 0};
  if (cfg.record_stride > 0) traj.recorded.push_back(state);
  for (long k = 0; k < cfg.iters; ++k) {
    state = step_impl(state, data, model, cfg, mean_grad,
                      chain_stream.derive(static_cast<std::uint64_t>(k)), replica);
    if (cfg.record_stride > 0 && state.step_index % cfg.record_stride == 0) {
      traj.recorded.push_back(state);
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

Eigen::MatrixXd run_replicas(const Dataset& data, const LossModel& model,
                             const ChainConfig& cfg, long replicas,
                             int threads, std::uint64_t chain_tag) {
  if (replicas < 1) throw std::domain_error("run_replicas: replicas must be >= 1");
  cfg.validate(data.size());
  const int d = model.param_dim(data.point_dim());
  Eigen::MatrixXd out(replicas, d);

  const int workers = static_cast<int>(
      std::max<long>(1, std::min<long>(threads, replicas)));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        ChainConfig local = cfg;
        local.record_stride = 0;
        for (long r = w; r < replicas; r += workers) {
          out.row(r) = run_chain(data, model, local, r, chain_tag).final_state.theta;
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

NeighborRun run_neighbor_pair(const Dataset& data, const Dataset& neighbor,
                              const LossModel& model, const ChainConfig& cfg,
                              long replicas, bool coupled, int threads) {
  if (data.size() != neighbor.size() || data.point_dim() != neighbor.point_dim()) {
    throw std::invalid_argument("run_neighbor_pair: datasets must have equal shape");
  }
  int differing = 0;
  for (int i = 0; i < data.size(); ++i) {
    if (data.points[i] != neighbor.points[i]) ++differing;
  }
  if (differing > 1) {
    throw std::invalid_argument("run_neighbor_pair: datasets differ in more than one point");
  }
  NeighborRun run;
  run.base = run_replicas(data, model, cfg, replicas, threads, /*chain_tag=*/0);
  run.neighbor = run_replicas(neighbor, model, cfg, replicas, threads,
                              /*chain_tag=*/coupled ? 0 : 1);
  return run;
}

}  // namespace stabledp
