#pragma once

#include <cstdint>
#include <vector>

#include "sbtm/icl.hpp"

namespace sbtm {

enum class InitMethod { random, kmeans_profile };

struct FitConfig {
  int k_up = 10;
  int n_restarts = 1;
  InitMethod init = InitMethod::kmeans_profile;
  uint64_t seed = 1;
  int max_sweeps = 100;       // safety cap on sweep passes per restart
  bool resweep_after_merge = false;
  int n_threads = 0;          // 0 = hardware concurrency; restarts run in parallel
};

struct FitResult {
  AllocationMatrix z_hat;
  double log_icl = 0.0;
  int k_hat = 0;
  int n_sweeps = 0;
  int restart_index = 0;
  double wall_time_s = 0.0;
};

/// Independent uniform label in 1..k_up for every active (t,i); 0 elsewhere.
AllocationMatrix init_random(const AdjacencyCube& cube, int k_up, uint64_t seed);

/// k-means over per-(t,i) connectivity profiles (the node's adjacency row at
/// frame t plus its row at t-1). May return fewer than k_up nonempty labels
/// when the profiles collapse.
AllocationMatrix init_kmeans_profile(const AdjacencyCube& cube, int k_up, uint64_t seed);

/// Mutable optimiser state: allocation, its statistics and the current
/// objective value, kept consistent by every update. Owns a copy of the
/// hyperparameters; the cube must outlive the state.
struct GreedyState {
  const AdjacencyCube* cube = nullptr;
  Hyperparameters hyper;
  AllocationMatrix z;
  SufficientStats stats;
  double log_icl = 0.0;

  GreedyState(const AdjacencyCube& c, const Hyperparameters& h, AllocationMatrix z0);
};

/// One pass over all active (t,i) in a uniformly shuffled order, applying
/// the best label move each (current label kept on ties). Returns whether
/// the objective strictly increased. Applied deltas are appended to
/// *applied_deltas when given.
bool greedy_sweep(GreedyState& state, uint64_t order_seed,
                  std::vector<double>* applied_deltas = nullptr);

/// Repeatedly applies the best group merge while one improves the
/// objective. Never decreases the objective.
void merge_phase(GreedyState& state, std::vector<double>* applied_deltas = nullptr);

/// Full optimiser: per restart, initialise, sweep to convergence, merge;
/// returns the best result (ties: fewer groups, then lower restart index).
/// Output labels are compacted to 1..K. Deterministic given the config,
/// independent of thread count.
FitResult fit(const AdjacencyCube& cube, const Hyperparameters& hyper, const FitConfig& config);

}  // namespace sbtm
