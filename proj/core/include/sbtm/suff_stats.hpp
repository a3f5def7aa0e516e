#pragma once

#include <cstdint>
#include <iosfwd>

#include "sbtm/adjacency_cube.hpp"
#include "sbtm/allocation.hpp"
#include "sbtm/matrix.hpp"

namespace sbtm {

/// Block-level counts the likelihood factorises over. Every observed dyad
/// (i<j, t with both nodes active) increments exactly one of the six regime
/// counters in its unordered block {z_i, z_j}:
///
///   eta / zeta : new-dyad regime (t=1 or the dyad was unobserved at t-1),
///                split by the current edge value;
///   u01 / u00  : creation regime (observed at t-1 with no edge), split by
///                whether the edge appeared;
///   u10 / u11  : destruction regime (observed at t-1 with an edge), split
///                by whether the edge was dropped (u10) or kept (u11).
///
/// zeta is maintained as the failure count complementary to eta, so
/// eta+zeta covers every new-dyad-regime dyad of the block (see dump()).
/// r, n1 and n_agg tally the label Markov chains including state 0.
struct SufficientStats {
  int k_up = 0;
  int n_nodes = 0;
  int n_frames = 0;

  BlockPairs<long long> eta, zeta, u01, u00, u10, u11;
  Matrix<long long> r;               // (k_up+1)^2 label transition counts
  std::vector<long long> n1;         // frame-1 sizes per state, length k_up+1
  std::vector<long long> n_agg;      // sizes aggregated over t>=2
  std::vector<long long> occupancy;  // n1 + n_agg, maintained for emptiness tests

  SufficientStats() = default;
  SufficientStats(int k_up, int n_nodes, int n_frames);

  bool group_nonempty(int g) const { return occupancy[g] > 0; }
  /// Number of nonempty groups (labels >= 1).
  int n_groups() const;
  /// Total of all six regime counters; equals the observed dyad count.
  long long total_regime_count() const;

  /// Diagnostic text dump of every counter.
  void dump(std::ostream& os) const;

  bool operator==(const SufficientStats&) const = default;
};

/// Full recount from scratch. Throws ConsistencyError if z disagrees with
/// the cube's activity pattern.
SufficientStats compute_stats(const AdjacencyCube& cube, const AllocationMatrix& z);

/// Moves node i at frame t to g_new, updating stats incrementally and z in
/// place. Only counters touching i's frame-t dyads, i's transitions at
/// (t-1 -> t) and (t -> t+1), and the state sizes change. No-op when g_new
/// equals the current label.
void apply_move(SufficientStats& stats, const AdjacencyCube& cube, AllocationMatrix& z,
                int t, int i, int g_new);

/// Relabels every occurrence of group h as g in the counts (row/column
/// additions only; the cube is not touched).
SufficientStats merged_stats(const SufficientStats& stats, int g, int h);

}  // namespace sbtm
