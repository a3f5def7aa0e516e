#include "sbtm/suff_stats.hpp"

#include <ostream>

#include "sbtm/errors.hpp"

namespace sbtm {

namespace {

// Regime families, split by the current edge value.
enum Family : int { kEta = 0, kZeta = 1, kU01 = 2, kU00 = 3, kU10 = 4, kU11 = 5 };

// Classifies the dyad (i,j,t): which of the six counters it feeds.
// Requires y(i,j,t) = 1.
inline Family classify(const AdjacencyCube& cube, int i, int j, int t) {
  bool x_now = cube.x(i, j, t);
  if (t == 0 || !cube.y(i, j, t - 1)) return x_now ? kEta : kZeta;
  if (cube.x(i, j, t - 1)) return x_now ? kU11 : kU10;
  return x_now ? kU01 : kU00;
}

inline BlockPairs<long long>& family_matrix(SufficientStats& s, int f) {
  switch (f) {
    case kEta: return s.eta;
    case kZeta: return s.zeta;
    case kU01: return s.u01;
    case kU00: return s.u00;
    case kU10: return s.u10;
    default: return s.u11;
  }
}

}  // namespace

SufficientStats::SufficientStats(int k_up_, int n_nodes_, int n_frames_)
    : k_up(k_up_), n_nodes(n_nodes_), n_frames(n_frames_),
      eta(k_up_), zeta(k_up_), u01(k_up_), u00(k_up_), u10(k_up_), u11(k_up_),
      r(k_up_ + 1, k_up_ + 1),
      n1(static_cast<size_t>(k_up_) + 1, 0),
      n_agg(static_cast<size_t>(k_up_) + 1, 0),
      occupancy(static_cast<size_t>(k_up_) + 1, 0) {}

int SufficientStats::n_groups() const {
  int k = 0;
  for (int g = 1; g <= k_up; ++g) k += group_nonempty(g) ? 1 : 0;
  return k;
}

long long SufficientStats::total_regime_count() const {
  long long total = 0;
  for (const auto* m : {&eta, &zeta, &u01, &u00, &u10, &u11})
    for (long long v : m->data()) total += v;
  return total;
}

void SufficientStats::dump(std::ostream& os) const {
  os << "suffstats k_up=" << k_up << " n=" << n_nodes << " t=" << n_frames << '\n';
  os << "zeta convention: complement of eta (eta+zeta covers all new-dyad-regime dyads)\n";
  auto dump_pairs = [&](const char* name, const BlockPairs<long long>& m) {
    os << name << ":\n";
    for (int g = 1; g <= k_up; ++g) {
      for (int h = g; h <= k_up; ++h) {
        if (m.at(g, h) != 0) os << "  (" << g << "," << h << ") " << m.at(g, h) << '\n';
      }
    }
  };
  dump_pairs("eta", eta);
  dump_pairs("zeta", zeta);
  dump_pairs("u01", u01);
  dump_pairs("u00", u00);
  dump_pairs("u10", u10);
  dump_pairs("u11", u11);
  os << "r:\n";
  for (int g = 0; g <= k_up; ++g) {
    for (int h = 0; h <= k_up; ++h) {
      if (r(g, h) != 0) os << "  " << g << "->" << h << " " << r(g, h) << '\n';
    }
  }
  os << "n1:";
  for (auto v : n1) os << ' ' << v;
  os << "\nn_agg:";
  for (auto v : n_agg) os << ' ' << v;
  os << '\n';
}

SufficientStats compute_stats(const AdjacencyCube& cube, const AllocationMatrix& z) {
  if (z.n_nodes() != cube.n_nodes() || z.n_frames() != cube.n_frames())
    throw ConsistencyError("allocation shape does not match cube");
  check_consistent(z, cube.activity());

  SufficientStats s(z.k_up(), cube.n_nodes(), cube.n_frames());

  for (int t = 0; t < cube.n_frames(); ++t) {
    const auto& active = cube.active_nodes(t);
    for (size_t a = 0; a < active.size(); ++a) {
      int i = active[a];
      for (size_t b = a + 1; b < active.size(); ++b) {
        int j = active[b];
        Family f = classify(cube, i, j, t);
        family_matrix(s, f).at(z(i, t), z(j, t)) += 1;
      }
    }
  }

  for (int i = 0; i < cube.n_nodes(); ++i) {
    s.n1[z(i, 0)] += 1;
    for (int t = 1; t < cube.n_frames(); ++t) {
      s.r(z(i, t - 1), z(i, t)) += 1;
      s.n_agg[z(i, t)] += 1;
    }
  }
  for (int g = 0; g <= s.k_up; ++g) s.occupancy[g] = s.n1[g] + s.n_agg[g];
  return s;
}

void apply_move(SufficientStats& stats, const AdjacencyCube& cube, AllocationMatrix& z,
                int t, int i, int g_new) {
  int g_cur = z(i, t);
  if (!cube.active(i, t) || g_cur == 0)
    throw ConsistencyError("cannot move inactive node " + std::to_string(i) + " at frame " +
                           std::to_string(t));
  if (g_new == 0) throw ConsistencyError("label 0 is reserved for inactive nodes");
  if (g_new < 0 || g_new > stats.k_up)
    throw ArgumentError("target label " + std::to_string(g_new) + " outside 1.." +
                        std::to_string(stats.k_up));
  if (g_new == g_cur) return;

  for (int j : cube.active_nodes(t)) {
    if (j == i) continue;
    Family f = classify(cube, i, j, t);
    auto& m = family_matrix(stats, f);
    int h = z(j, t);
    m.at(g_cur, h) -= 1;
    m.at(g_new, h) += 1;
  }

  if (t > 0) {
    stats.r(z(i, t - 1), g_cur) -= 1;
    stats.r(z(i, t - 1), g_new) += 1;
  }
  if (t + 1 < cube.n_frames()) {
    stats.r(g_cur, z(i, t + 1)) -= 1;
    stats.r(g_new, z(i, t + 1)) += 1;
  }
  if (t == 0) {
    stats.n1[g_cur] -= 1;
    stats.n1[g_new] += 1;
  } else {
    stats.n_agg[g_cur] -= 1;
    stats.n_agg[g_new] += 1;
  }
  stats.occupancy[g_cur] -= 1;
  stats.occupancy[g_new] += 1;
  z.set(i, t, g_new);
}

SufficientStats merged_stats(const SufficientStats& stats, int g, int h) {
  if (g == h) throw ArgumentError("cannot merge a group with itself");
  if (g < 1 || g > stats.k_up || h < 1 || h > stats.k_up)
    throw ArgumentError("merge labels outside 1..k_up");
  if (!stats.group_nonempty(g) || !stats.group_nonempty(h))
    throw ArgumentError("cannot merge an empty group");

  SufficientStats out(stats.k_up, stats.n_nodes, stats.n_frames);
  auto relabel = [&](int a) { return a == h ? g : a; };

  const BlockPairs<long long>* src[6] = {&stats.eta, &stats.zeta, &stats.u01,
                                         &stats.u00, &stats.u10, &stats.u11};
  BlockPairs<long long>* dst[6] = {&out.eta, &out.zeta, &out.u01, &out.u00, &out.u10, &out.u11};
  for (int f = 0; f < 6; ++f) {
    for (int a = 1; a <= stats.k_up; ++a) {
      for (int b = a; b <= stats.k_up; ++b) {
        long long v = src[f]->at(a, b);
        if (v != 0) dst[f]->at(relabel(a), relabel(b)) += v;
      }
    }
  }
  for (int a = 0; a <= stats.k_up; ++a) {
    for (int b = 0; b <= stats.k_up; ++b) {
      long long v = stats.r(a, b);
      if (v != 0) out.r(relabel(a), relabel(b)) += v;
    }
  }
  for (int a = 0; a <= stats.k_up; ++a) {
    out.n1[relabel(a)] += stats.n1[a];
    out.n_agg[relabel(a)] += stats.n_agg[a];
  }
  for (int a = 0; a <= stats.k_up; ++a) out.occupancy[a] = out.n1[a] + out.n_agg[a];
  return out;
}

}  // namespace sbtm
