#pragma once

#include <array>
#include <vector>

#include "sbtm/hyperparams.hpp"
#include "sbtm/suff_stats.hpp"

namespace sbtm {

/// Exact integrated completed likelihood on the natural log scale, computed
/// from the sufficient statistics with every continuous parameter collapsed
/// under its conjugate prior.
///
/// The value is the sum of
///  - the allocation block: sum_g N1[g]*log(alpha_g) plus one
///    Dirichlet-multinomial log-ratio per state, where alpha_g is the share
///    of the aggregated t>=2 sizes and the states entering the products are
///    the inactive state 0 plus the nonempty groups (the constants depend on
///    the number of groups, so empty groups are excluded);
///  - one Beta-binomial block per nonempty pair and regime family, prior
///    normalising constants included.
///
/// A group occupied at frame 1 but at no later frame has alpha_g = 0 with a
/// positive exponent: the configuration has no prior mass and -inf is
/// returned. With a single frame alpha is taken uniform over the states
/// occupied at frame 1. 0*log(0) counts as 0.
///
/// Values are comparable only across allocations of the same data (a
/// data-only proportionality constant is dropped).
double log_icl_full(const SufficientStats& stats, const Hyperparameters& hyper);

/// ICL change from moving node i at frame t to g_new, evaluated touching
/// only the affected block terms. Read-only; never mutates shared state.
/// Returns exactly 0 when g_new is the current label.
double log_icl_delta_move(const SufficientStats& stats, const Hyperparameters& hyper,
                          const AdjacencyCube& cube, const AllocationMatrix& z,
                          int t, int i, int g_new);

/// ICL change from relabelling every occurrence of group h as g, computed
/// from merged count matrices. Throws ArgumentError if g == h or either
/// group is empty.
double log_icl_delta_merge(const SufficientStats& stats, const Hyperparameters& hyper,
                           int g, int h);

namespace detail {

/// Shared per-(t,i) context for evaluating candidate moves: the neighbour
/// dyad counts by group and regime are gathered once and reused for every
/// candidate label. Used by the greedy sweep; log_icl_delta_move wraps it.
class MoveContext {
 public:
  MoveContext(const SufficientStats& stats, const Hyperparameters& hyper,
              const AdjacencyCube& cube, const AllocationMatrix& z, int t, int i);

  /// Delta for moving to g_new (0 when g_new is the current label).
  double eval(int g_new) const;
  int current_label() const { return g_cur_; }

 private:
  const std::vector<int>& included_states_unchanged() const { return states_old_; }

  const SufficientStats& stats_;
  const Hyperparameters& hyper_;
  int t_, i_, g_cur_;
  int z_prev_ = -1;  // -1: no previous frame
  int z_next_ = -1;
  bool last_frame_ = false;
  long long d_total_ = 0;
  double alpha_exp_old_ = 0.0;
  // counts of i's frame-t dyads by neighbour group and regime family
  std::vector<std::array<long long, 6>> dyads_by_group_;
  std::vector<int> touched_groups_;
  std::vector<int> states_old_;
  double dirmult_old_ = 0.0;
  bool have_dirmult_old_ = false;
};

}  // namespace detail

}  // namespace sbtm
