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

#ifndef STABLEDP_OPTIMIZER_HPP
#define STABLEDP_OPTIMIZER_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "stabledp/problems.hpp"
#include "stabledp/rng.hpp"

namespace stabledp {

enum class InitPolicy { kZero, kStablePoint, kFixedVector };

// Noisy (S)GD configuration:
//   theta_k = theta_{k-1} - (eta/b) sum_{i in batch} grad f(theta_{k-1}, x_i)
//             + sigma * xi_k,
// with xi_k a unit rotationally invariant alpha-stable vector. batch_size 0
// (or n) selects the full-gradient chain. There is no clipping or projection
// of any kind: the update is affine-plus-noise.
struct ChainConfig {
  double eta = 0.1;
  double sigma = 1.0;
  double alpha = 2.0;
  int batch_size = 0;  // 0 means full batch
  long iters = 0;
  std::uint64_t seed = 0;
  InitPolicy init = InitPolicy::kStablePoint;
  Vec init_vector;        // used by kFixedVector
  long record_stride = 0; // 0: keep only the final state

  void validate(int n) const;
  int effective_batch(int n) const { return batch_size == 0 ? n : batch_size; }
};

struct ChainState {
  Vec theta;
  long step_index = 0;
};

// Heavy-tailed noise legitimately produces huge jumps; only a non-finite
// iterate is an error, and it carries where it happened.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, long replica)
      : std::runtime_error("chain diverged (non-finite iterate) at step " +
                           std::to_string(step) + ", replica " +
                           std::to_string(replica)),
        step(step),
        replica(replica) {}
  long step;
  long replica;
};

// Uniformly random size-b subset of {0, ..., n-1}, without replacement,
// returned sorted. Fresh each call.
std::vector<int> sample_batch(int n, int b, RngStream& rng);

// One transition. `step_stream` must be the per-(seed, replica, step) stream;
// the batch, noise and subordinator draws come from disjoint purpose
// sub-streams of it.
ChainState sgd_step(const ChainState& state, const Dataset& data,
                    const LossModel& model, const ChainConfig& cfg,
                    RngStream step_stream);

struct Trajectory {
  std::vector<ChainState> recorded;  // per record_stride, plus the final state
  ChainState final_state;
};

// Runs the chain for cfg.iters steps. Deterministic function of
// (data, model, cfg, replica, chain_tag); the same inputs give bitwise
// identical output regardless of what else ran before.
Trajectory run_chain(const Dataset& data, const LossModel& model,
                     const ChainConfig& cfg, long replica = 0,
                     std::uint64_t chain_tag = 0);

// replicas x d matrix of final iterates; row r is the chain run with replica
// id r, so growing the replica count extends the matrix without changing
// earlier rows. Threads only partition work, never the stream layout.
Eigen::MatrixXd run_replicas(const Dataset& data, const LossModel& model,
                             const ChainConfig& cfg, long replicas,
                             int threads = 1, std::uint64_t chain_tag = 0);

struct NeighborRun {
  Eigen::MatrixXd base;
  Eigen::MatrixXd neighbor;
};

// Replica sets for a dataset and a neighboring dataset (must differ in
// exactly one point). Default draws independent noise for the two chains (the
// distance of interest is between laws); coupled == true reuses the same
// noise and batch streams for diagnostic trajectories.
NeighborRun run_neighbor_pair(const Dataset& data, const Dataset& neighbor,
                              const LossModel& model, const ChainConfig& cfg,
                              long replicas, bool coupled = false,
                              int threads = 1);

}  // namespace stabledp

#endif  // STABLEDP_OPTIMIZER_HPP
