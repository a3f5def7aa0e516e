#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbtm/adjacency_cube.hpp"

namespace sbtm {

/// Per-node per-frame cluster labels. Label 0 is reserved for inactive
/// nodes; active entries lie in 1..k_up.
class AllocationMatrix {
 public:
  AllocationMatrix() : n_nodes_(0), n_frames_(0), k_up_(0) {}
  AllocationMatrix(int n_nodes, int n_frames, int k_up)
      : n_nodes_(n_nodes), n_frames_(n_frames), k_up_(k_up),
        z_(static_cast<size_t>(n_nodes) * n_frames, 0) {}

  int n_nodes() const { return n_nodes_; }
  int n_frames() const { return n_frames_; }
  int k_up() const { return k_up_; }

  int32_t operator()(int i, int t) const { return z_[idx(i, t)]; }
  void set(int i, int t, int32_t g) { z_[idx(i, t)] = g; }

  /// Number of distinct nonzero labels present.
  int n_groups() const;
  /// Sorted distinct nonzero labels.
  std::vector<int> nonempty_labels() const;

  /// Relabels nonempty groups to 1..K preserving label order, uniformly
  /// across frames. Returns the old->new map (index = old label).
  std::vector<int> compact_labels();

  bool operator==(const AllocationMatrix&) const = default;

 private:
  size_t idx(int i, int t) const { return static_cast<size_t>(t) * n_nodes_ + i; }
  int n_nodes_, n_frames_, k_up_;
  std::vector<int32_t> z_;  // frame-major
};

/// Throws ConsistencyError unless z(i,t)==0 exactly where the activity says
/// inactive and active entries lie in 1..k_up.
void check_consistent(const AllocationMatrix& z, const NodeActivity& activity);

/// CSV with one row per node, one column per frame, integer labels.
void write_allocation_csv(const std::string& path, const AllocationMatrix& z);
AllocationMatrix read_allocation_csv(const std::string& path, int k_up = 0);

}  // namespace sbtm
