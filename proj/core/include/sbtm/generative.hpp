#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sbtm/allocation.hpp"
#include "sbtm/hyperparams.hpp"
#include "sbtm/suff_stats.hpp"

namespace sbtm {

/// Generative parameters of the model: symmetric connection probability
/// matrices for the three regimes, the label transition matrix over states
/// 0..k (row-stochastic) and the initial-state distribution.
struct ModelParameters {
  int k = 0;
  BlockPairs<double> theta;  // new-dyad edge probability
  BlockPairs<double> p;      // creation probability
  BlockPairs<double> q;      // destruction probability
  Matrix<double> pi;         // (k+1) x (k+1)
  std::vector<double> alpha; // length k+1

  /// Throws ArgumentError on broken invariants (rows not summing to 1
  /// within 1e-12, probabilities outside [0,1], alpha not a distribution).
  void check() const;

  /// Stationary distribution of pi by power iteration to 1e-12.
  std::vector<double> stationary() const;

  void write(std::ostream& os) const;
  void write_file(const std::string& path) const;
  static ModelParameters read(std::istream& is, const std::string& name = "<stream>");
  static ModelParameters read_file(const std::string& path);
};

/// Draws parameters from the priors: pi rows Dirichlet(delta row), theta/p/q
/// entries Beta for g<=h mirrored to symmetry. alpha is the stationary
/// distribution of the sampled pi.
ModelParameters sample_params(int k, const Hyperparameters& hyper, uint64_t seed);

/// Independent label Markov chains: z_i(1) ~ Categorical(alpha),
/// z_i(t) | z_i(t-1)=g ~ Categorical(pi row g). State 0 = inactive.
AllocationMatrix sample_allocations(int n_nodes, int n_frames, const ModelParameters& params,
                                    uint64_t seed);

/// Samples edges dyad by dyad under the regime probabilities. The cube's
/// activity is taken from z (a node may be active yet isolated). When
/// regime_tally is given it receives the generator's own per-block regime
/// counts, for white-box comparison against compute_stats.
AdjacencyCube sample_edges(const AllocationMatrix& z, const ModelParameters& params,
                           uint64_t seed, SufficientStats* regime_tally = nullptr);

struct SimOutput {
  AdjacencyCube cube;
  AllocationMatrix z_true;
  ModelParameters params;
  SufficientStats regime_tally;
};

/// Composition of the three samplers with parameters drawn from the priors.
SimOutput simulate(int n_nodes, int n_frames, int k, const Hyperparameters& hyper,
                   uint64_t seed);
/// Same with fixed parameters.
SimOutput simulate(int n_nodes, int n_frames, const ModelParameters& params, uint64_t seed);

/// Zeroes all transition mass into state 0 (and alpha[0]), renormalising
/// rows; nodes can then never become inactive.
ModelParameters without_inactivity(ModelParameters params);

/// The fixed three-group benchmark configuration: assortative theta, groups
/// that respectively keep, churn and drop their edges, self-transition 0.8
/// with the remaining mass split over the other groups, no inactivity.
ModelParameters benchmark_params();

}  // namespace sbtm
