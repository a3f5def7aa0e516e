#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbtm/event_list.hpp"

namespace sbtm {

/// Per-node activity indicator over frames: active(i, t) is true iff node i
/// is active at frame t. The joint-activity mask y of the model is the dyad
/// product active(i,t) * active(j,t) and is never materialised.
class NodeActivity {
 public:
  NodeActivity() : n_nodes_(0), n_frames_(0) {}
  NodeActivity(int n_nodes, int n_frames)
      : n_nodes_(n_nodes), n_frames_(n_frames),
        active_(static_cast<size_t>(n_nodes) * n_frames, 0) {}

  int n_nodes() const { return n_nodes_; }
  int n_frames() const { return n_frames_; }

  bool active(int i, int t) const { return active_[idx(i, t)] != 0; }
  void set(int i, int t, bool a) { active_[idx(i, t)] = a ? 1 : 0; }

  bool operator==(const NodeActivity&) const = default;

 private:
  size_t idx(int i, int t) const { return static_cast<size_t>(t) * n_nodes_ + i; }
  int n_nodes_;
  int n_frames_;
  std::vector<uint8_t> active_;  // frame-major
};

enum class ActivityRule {
  degree,    // active iff the node has at least one edge in the frame
  explicit_  // activity supplied separately (longitudinal presence data)
};

/// An undirected edge observed at a frame, i < j after normalisation.
struct FrameEdge {
  int t;
  int i;
  int j;
  auto operator<=>(const FrameEdge&) const = default;
};

/// Dynamic binary network: N nodes, T frames, per-frame sorted edge sets
/// plus the node activity pattern. Immutable once constructed; cheap to
/// share read-only across threads.
class AdjacencyCube {
 public:
  /// Builds the cube from (t,i,j) edge triplets. Triplets are normalised to
  /// i < j and deduplicated. When `activity` is absent the degree rule is
  /// applied; when present it is taken as-is and edges incident to a node it
  /// marks inactive raise InputError.
  AdjacencyCube(int n_nodes, int n_frames, std::vector<FrameEdge> edges,
                std::optional<NodeActivity> activity = std::nullopt);

  int n_nodes() const { return n_nodes_; }
  int n_frames() const { return n_frames_; }

  bool x(int i, int j, int t) const;
  bool y(int i, int j, int t) const {
    return i != j && activity_.active(i, t) && activity_.active(j, t);
  }
  bool active(int i, int t) const { return activity_.active(i, t); }
  const NodeActivity& activity() const { return activity_; }

  /// Sorted neighbour ids of node i at frame t.
  std::span<const int32_t> neighbors(int i, int t) const;
  /// Sorted list of nodes active at frame t.
  const std::vector<int32_t>& active_nodes(int t) const { return active_by_frame_[t]; }
  /// Edges of frame t as (i, j) with i < j, ascending.
  std::span<const std::pair<int32_t, int32_t>> frame_edges(int t) const;

  long long n_edges() const { return n_edges_; }
  /// Number of observed dyads: pairs (i<j, t) with both endpoints active.
  long long n_observed_dyads() const;

  bool operator==(const AdjacencyCube& o) const {
    return n_nodes_ == o.n_nodes_ && n_frames_ == o.n_frames_ &&
           edges_ == o.edges_ && activity_ == o.activity_;
  }

 private:
  int n_nodes_;
  int n_frames_;
  long long n_edges_ = 0;
  std::vector<std::pair<int32_t, int32_t>> edges_;  // all frames, frame-major
  std::vector<size_t> frame_edge_offset_;           // size T+1
  std::vector<int32_t> adj_;                        // per frame CSR neighbour ids
  std::vector<size_t> adj_offset_;                  // size N*T+1, frame-major rows
  std::vector<std::vector<int32_t>> active_by_frame_;
  NodeActivity activity_;
};

/// Buckets events into frames of the given width. Frames are the left-open
/// right-closed intervals (origin+(t-1)w, origin+tw]. By default the origin
/// is the minimum timestamp rounded down to a multiple of the width; an
/// event landing exactly on the origin goes to frame 1. Activity follows the
/// degree rule.
AdjacencyCube discretize(const EventList& events, double frame_width,
                         std::optional<double> time_origin = std::nullopt);

/// Recomputes the activity pattern of a cube. Under ActivityRule::degree a
/// node is active where it has at least one edge; under explicit_ the given
/// pattern is used.
NodeActivity derive_activity(const AdjacencyCube& cube,
                             ActivityRule rule = ActivityRule::degree,
                             const NodeActivity* explicit_activity = nullptr);

/// Rebuilds the cube with a different activity pattern (same edges).
AdjacencyCube with_activity(const AdjacencyCube& cube, NodeActivity activity);

// ---------------------------------------------------------------------------
// Validation

/// Raw dense cube payload, used at ingestion boundaries and by validate();
/// unlike AdjacencyCube it can represent asymmetric or otherwise broken data.
struct DenseCube {
  int n_nodes = 0;
  int n_frames = 0;
  std::vector<uint8_t> x;  // N*N*T, frame-major
  std::vector<uint8_t> y;

  DenseCube() = default;
  DenseCube(int n, int t)
      : n_nodes(n), n_frames(t),
        x(static_cast<size_t>(n) * n * t, 0), y(static_cast<size_t>(n) * n * t, 0) {}
  size_t idx(int i, int j, int t) const {
    return (static_cast<size_t>(t) * n_nodes + i) * n_nodes + j;
  }
  uint8_t& x_at(int i, int j, int t) { return x[idx(i, j, t)]; }
  uint8_t& y_at(int i, int j, int t) { return y[idx(i, j, t)]; }
};

struct Violation {
  enum class Kind { asymmetry, nonzero_diagonal, x_exceeds_y, y_not_factorisable };
  Kind kind;
  int t, i, j;
  std::string to_string() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const DenseCube& cube);
ValidationReport validate(const AdjacencyCube& cube);
DenseCube to_dense(const AdjacencyCube& cube);

// ---------------------------------------------------------------------------
// File formats

/// Cube file: header line `N T`, then one `t i j` line per edge, ascending
/// (t, i, j) with i < j, 0-based. `#` lines are ignored.
void write_cube_file(const std::string& path, const AdjacencyCube& cube);
AdjacencyCube read_cube_file(const std::string& path,
                             const std::optional<std::string>& activity_path = std::nullopt);

/// Activity file: one `t i` line per active (frame, node) pair, 0-based.
void write_activity_file(const std::string& path, const NodeActivity& activity);
NodeActivity read_activity_file(const std::string& path, int n_nodes, int n_frames);

/// Serialises each edge of frame t (1-based) as an event at the midpoint of
/// the frame interval, origin + (t-0.5)*width. Re-discretising the result
/// with the same width reproduces the cube.
EventList cube_to_events(const AdjacencyCube& cube, double frame_width, double origin = 0.0);

}  // namespace sbtm
