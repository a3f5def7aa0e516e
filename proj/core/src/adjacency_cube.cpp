#include "sbtm/adjacency_cube.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sbtm/errors.hpp"

namespace sbtm {

AdjacencyCube::AdjacencyCube(int n_nodes, int n_frames, std::vector<FrameEdge> edges,
                             std::optional<NodeActivity> activity)
    : n_nodes_(n_nodes), n_frames_(n_frames) {
  if (n_nodes < 0 || n_frames <= 0) throw ArgumentError("cube dimensions must be positive");
  for (auto& e : edges) {
    if (e.i == e.j) throw InputError("self-edge on node " + std::to_string(e.i));
    if (e.i < 0 || e.j < 0 || e.i >= n_nodes || e.j >= n_nodes)
      throw InputError("edge references node outside 0.." + std::to_string(n_nodes - 1));
    if (e.t < 0 || e.t >= n_frames)
      throw InputError("edge references frame outside 0.." + std::to_string(n_frames - 1));
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  n_edges_ = static_cast<long long>(edges.size());
  edges_.reserve(edges.size());
  frame_edge_offset_.assign(n_frames_ + 1, 0);
  for (const auto& e : edges) {
    edges_.emplace_back(e.i, e.j);
    ++frame_edge_offset_[e.t + 1];
  }
  for (int t = 0; t < n_frames_; ++t) frame_edge_offset_[t + 1] += frame_edge_offset_[t];

  if (activity) {
    if (activity->n_nodes() != n_nodes_ || activity->n_frames() != n_frames_)
      throw ArgumentError("activity shape does not match cube");
    activity_ = std::move(*activity);
    for (const auto& e : edges) {
      if (!activity_.active(e.i, e.t) || !activity_.active(e.j, e.t))
        throw InputError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                         ") at frame " + std::to_string(e.t) +
                         " touches a node marked inactive");
    }
  } else {
    activity_ = NodeActivity(n_nodes_, n_frames_);
    for (const auto& e : edges) {
      activity_.set(e.i, e.t, true);
      activity_.set(e.j, e.t, true);
    }
  }

  // Per-frame CSR adjacency (both directions) and active node lists.
  adj_offset_.assign(static_cast<size_t>(n_nodes_) * n_frames_ + 1, 0);
  for (const auto& e : edges) {
    ++adj_offset_[static_cast<size_t>(e.t) * n_nodes_ + e.i + 1];
    ++adj_offset_[static_cast<size_t>(e.t) * n_nodes_ + e.j + 1];
  }
  for (size_t k = 1; k < adj_offset_.size(); ++k) adj_offset_[k] += adj_offset_[k - 1];
  adj_.resize(adj_offset_.back());
  {
    std::vector<size_t> cursor(adj_offset_.begin(), adj_offset_.end() - 1);
    for (const auto& e : edges) {
      adj_[cursor[static_cast<size_t>(e.t) * n_nodes_ + e.i]++] = e.j;
      adj_[cursor[static_cast<size_t>(e.t) * n_nodes_ + e.j]++] = e.i;
    }
  }
  // rows come out sorted already for the i side; sort to be safe for j side
  for (size_t row = 0; row + 1 < adj_offset_.size(); ++row) {
    std::sort(adj_.begin() + adj_offset_[row], adj_.begin() + adj_offset_[row + 1]);
  }

  active_by_frame_.assign(n_frames_, {});
  for (int t = 0; t < n_frames_; ++t) {
    for (int i = 0; i < n_nodes_; ++i) {
      if (activity_.active(i, t)) active_by_frame_[t].push_back(i);
    }
  }
}

bool AdjacencyCube::x(int i, int j, int t) const {
  if (i == j) return false;
  auto nb = neighbors(i, t);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::span<const int32_t> AdjacencyCube::neighbors(int i, int t) const {
  size_t row = static_cast<size_t>(t) * n_nodes_ + i;
  return {adj_.data() + adj_offset_[row], adj_offset_[row + 1] - adj_offset_[row]};
}

std::span<const std::pair<int32_t, int32_t>> AdjacencyCube::frame_edges(int t) const {
  return {edges_.data() + frame_edge_offset_[t], frame_edge_offset_[t + 1] - frame_edge_offset_[t]};
}

long long AdjacencyCube::n_observed_dyads() const {
  long long total = 0;
  for (int t = 0; t < n_frames_; ++t) {
    long long a = static_cast<long long>(active_by_frame_[t].size());
    total += a * (a - 1) / 2;
  }
  return total;
}

// ---------------------------------------------------------------------------

AdjacencyCube discretize(const EventList& events, double frame_width,
                         std::optional<double> time_origin) {
  if (!(frame_width > 0.0)) throw ArgumentError("frame_width must be positive");
  if (events.events.empty()) throw InputError("event list is empty");

  double min_ts = events.events.front().time;
  double max_ts = min_ts;
  for (const auto& e : events.events) {
    if (e.i < 0 || e.j < 0) throw InputError("negative node id in event list");
    if (e.i >= events.n_nodes || e.j >= events.n_nodes)
      throw InputError("event references unknown node id " + std::to_string(std::max(e.i, e.j)));
    if (e.i == e.j) throw InputError("self-loop event on node " + std::to_string(e.i));
    min_ts = std::min(min_ts, e.time);
    max_ts = std::max(max_ts, e.time);
  }

  // Frames are (origin+(t-1)w, origin+tw]; the default origin is the minimum
  // timestamp rounded down to the frame grid, so the first event lands in
  // frame 1 (events exactly on the origin are clamped there).
  double origin = time_origin ? *time_origin : std::floor(min_ts / frame_width) * frame_width;
  if (min_ts < origin) throw InputError("event precedes the time origin");

  int n_frames = std::max(1, static_cast<int>(std::ceil((max_ts - origin) / frame_width)));
  std::vector<FrameEdge> edges;
  edges.reserve(events.events.size());
  for (const auto& e : events.events) {
    int t = std::max(1, static_cast<int>(std::ceil((e.time - origin) / frame_width)));
    edges.push_back({t - 1, e.i, e.j});
  }
  return AdjacencyCube(events.n_nodes, n_frames, std::move(edges));
}

NodeActivity derive_activity(const AdjacencyCube& cube, ActivityRule rule,
                             const NodeActivity* explicit_activity) {
  if (rule == ActivityRule::explicit_) {
    if (!explicit_activity) throw ArgumentError("explicit activity rule needs a pattern");
    if (explicit_activity->n_nodes() != cube.n_nodes() ||
        explicit_activity->n_frames() != cube.n_frames())
      throw ArgumentError("explicit activity shape does not match cube");
    return *explicit_activity;
  }
  NodeActivity act(cube.n_nodes(), cube.n_frames());
  for (int t = 0; t < cube.n_frames(); ++t) {
    for (auto [i, j] : cube.frame_edges(t)) {
      act.set(i, t, true);
      act.set(j, t, true);
    }
  }
  return act;
}

AdjacencyCube with_activity(const AdjacencyCube& cube, NodeActivity activity) {
  std::vector<FrameEdge> edges;
  edges.reserve(static_cast<size_t>(cube.n_edges()));
  for (int t = 0; t < cube.n_frames(); ++t) {
    for (auto [i, j] : cube.frame_edges(t)) edges.push_back({t, i, j});
  }
  return AdjacencyCube(cube.n_nodes(), cube.n_frames(), std::move(edges), std::move(activity));
}

// ---------------------------------------------------------------------------
// Validation

std::string Violation::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::asymmetry:
      os << "asymmetry: x[" << i << "," << j << "," << t << "] != x[" << j << "," << i << "," << t << "]";
      break;
    case Kind::nonzero_diagonal:
      os << "nonzero diagonal: x[" << i << "," << i << "," << t << "] = 1";
      break;
    case Kind::x_exceeds_y:
      os << "x exceeds y at (" << i << "," << j << "," << t << ")";
      break;
    case Kind::y_not_factorisable:
      os << "y at frame " << t << " is not a product of node activities at (" << i << "," << j << ")";
      break;
  }
  return os.str();
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.to_string() << '\n';
  return os.str();
}

ValidationReport validate(const DenseCube& cube) {
  ValidationReport report;
  int n = cube.n_nodes;
  for (int t = 0; t < cube.n_frames; ++t) {
    for (int i = 0; i < n; ++i) {
      if (cube.x[cube.idx(i, i, t)] || cube.y[cube.idx(i, i, t)])
        report.violations.push_back({Violation::Kind::nonzero_diagonal, t, i, i});
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        uint8_t xij = cube.x[cube.idx(i, j, t)];
        uint8_t xji = cube.x[cube.idx(j, i, t)];
        uint8_t yij = cube.y[cube.idx(i, j, t)];
        uint8_t yji = cube.y[cube.idx(j, i, t)];
        if (xij != xji) report.violations.push_back({Violation::Kind::asymmetry, t, i, j});
        if (yij != yji) report.violations.push_back({Violation::Kind::asymmetry, t, i, j});
        if ((xij && !yij) || (xji && !yji))
          report.violations.push_back({Violation::Kind::x_exceeds_y, t, i, j});
      }
    }
    // y must factorise as a_i * a_j for some binary activity vector
    std::vector<uint8_t> a(n, 0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && cube.y[cube.idx(i, j, t)]) a[i] = 1;
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        uint8_t expect = a[i] && a[j];
        if (cube.y[cube.idx(i, j, t)] != expect && cube.y[cube.idx(j, i, t)] != expect)
          report.violations.push_back({Violation::Kind::y_not_factorisable, t, i, j});
      }
    }
  }
  return report;
}

ValidationReport validate(const AdjacencyCube& cube) {
  // the sparse representation enforces symmetry and the zero diagonal by
  // construction; x <= y can still be broken by an explicit activity pattern
  ValidationReport report;
  for (int t = 0; t < cube.n_frames(); ++t) {
    for (auto [i, j] : cube.frame_edges(t)) {
      if (!cube.y(i, j, t)) report.violations.push_back({Violation::Kind::x_exceeds_y, t, i, j});
    }
  }
  return report;
}

DenseCube to_dense(const AdjacencyCube& cube) {
  DenseCube d(cube.n_nodes(), cube.n_frames());
  for (int t = 0; t < cube.n_frames(); ++t) {
    for (auto [i, j] : cube.frame_edges(t)) {
      d.x_at(i, j, t) = d.x_at(j, i, t) = 1;
    }
    for (int i = 0; i < cube.n_nodes(); ++i) {
      for (int j = 0; j < cube.n_nodes(); ++j) {
        if (i != j) d.y_at(i, j, t) = cube.y(i, j, t) ? 1 : 0;
      }
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// File formats

namespace {

std::vector<long long> parse_int_fields(const std::string& line, const std::string& name,
                                        long long line_no) {
  std::vector<long long> out;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
    if (p >= end) break;
    long long v;
    auto [ptr, ec] = std::from_chars(p, end, v);
    if (ec != std::errc())
      throw InputError(name + ":" + std::to_string(line_no) + ": expected integer near `" +
                       std::string(p, std::min<size_t>(8, end - p)) + "`");
    out.push_back(v);
    p = ptr;
  }
  return out;
}

}  // namespace

void write_cube_file(const std::string& path, const AdjacencyCube& cube) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << cube.n_nodes() << ' ' << cube.n_frames() << '\n';
  for (int t = 0; t < cube.n_frames(); ++t) {
    for (auto [i, j] : cube.frame_edges(t)) os << t << ' ' << i << ' ' << j << '\n';
  }
}

AdjacencyCube read_cube_file(const std::string& path,
                             const std::optional<std::string>& activity_path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open cube file " + path);
  std::string line;
  long long line_no = 0;
  int n = -1, t_frames = -1;
  std::vector<FrameEdge> edges;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = parse_int_fields(line, path, line_no);
    if (f.empty()) continue;
    if (n < 0) {
      if (f.size() != 2)
        throw InputError(path + ":" + std::to_string(line_no) + ": header must be `N T`");
      n = static_cast<int>(f[0]);
      t_frames = static_cast<int>(f[1]);
      if (n < 0 || t_frames <= 0)
        throw InputError(path + ":" + std::to_string(line_no) + ": bad dimensions in header");
      continue;
    }
    if (f.size() != 3)
      throw InputError(path + ":" + std::to_string(line_no) + ": expected `t i j`");
    edges.push_back({static_cast<int>(f[0]), static_cast<int>(f[1]), static_cast<int>(f[2])});
  }
  if (n < 0) throw InputError(path + ": missing `N T` header");

  std::optional<NodeActivity> activity;
  if (activity_path) activity = read_activity_file(*activity_path, n, t_frames);
  try {
    return AdjacencyCube(n, t_frames, std::move(edges), std::move(activity));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_activity_file(const std::string& path, const NodeActivity& activity) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  for (int t = 0; t < activity.n_frames(); ++t) {
    for (int i = 0; i < activity.n_nodes(); ++i) {
      if (activity.active(i, t)) os << t << ' ' << i << '\n';
    }
  }
}

NodeActivity read_activity_file(const std::string& path, int n_nodes, int n_frames) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open activity file " + path);
  NodeActivity act(n_nodes, n_frames);
  std::string line;
  long long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = parse_int_fields(line, path, line_no);
    if (f.empty()) continue;
    if (f.size() != 2) throw InputError(path + ":" + std::to_string(line_no) + ": expected `t i`");
    auto [t, i] = std::pair(f[0], f[1]);
    if (t < 0 || t >= n_frames || i < 0 || i >= n_nodes)
      throw InputError(path + ":" + std::to_string(line_no) + ": (t,i) out of range");
    act.set(static_cast<int>(i), static_cast<int>(t), true);
  }
  return act;
}

EventList cube_to_events(const AdjacencyCube& cube, double frame_width, double origin) {
  EventList out;
  out.n_nodes = cube.n_nodes();
  for (int t = 0; t < cube.n_frames(); ++t) {
    double time = origin + (static_cast<double>(t) + 0.5) * frame_width;
    for (auto [i, j] : cube.frame_edges(t)) out.events.push_back({time, i, j});
  }
  return out;
}

}  // namespace sbtm
