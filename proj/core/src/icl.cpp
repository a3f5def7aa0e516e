#include "sbtm/icl.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "sbtm/errors.hpp"

namespace sbtm {

Hyperparameters Hyperparameters::uniform(int k_up, double value) {
  Hyperparameters h;
  h.k_up = k_up;
  h.delta = Matrix<double>(k_up + 1, k_up + 1, value);
  h.eta0 = BlockPairs<double>(k_up, value);
  h.zeta0 = BlockPairs<double>(k_up, value);
  h.a_p = BlockPairs<double>(k_up, value);
  h.b_p = BlockPairs<double>(k_up, value);
  h.a_q = BlockPairs<double>(k_up, value);
  h.b_q = BlockPairs<double>(k_up, value);
  return h;
}

void Hyperparameters::check() const {
  for (double v : delta.data()) {
    if (!(v > 0.0)) throw ArgumentError("Dirichlet hyperparameters must be strictly positive");
  }
  for (const auto* m : {&eta0, &zeta0, &a_p, &b_p, &a_q, &b_q}) {
    for (double v : m->data()) {
      if (!(v > 0.0)) throw ArgumentError("Beta hyperparameters must be strictly positive");
    }
  }
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

inline double lgam(double x) {
#ifdef __GLIBC__
  int sign;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// Regime families, matching the SufficientStats counters.
enum Family : int { kEta = 0, kZeta = 1, kU01 = 2, kU00 = 3, kU10 = 4, kU11 = 5 };

// log Beta-binomial block, prior normalising constant included. Exactly 0
// for an unobserved block so empty groups drop out of the products.
inline double beta_block(double a, double b, long long s, long long f) {
  if (s == 0 && f == 0) return 0.0;
  return lgam(a + b) - lgam(a) - lgam(b) + lgam(a + s) + lgam(b + f) - lgam(a + b + s + f);
}

// States entering the allocation products: 0 plus the nonempty groups.
std::vector<int> included_states(const SufficientStats& stats) {
  std::vector<int> states;
  states.reserve(stats.k_up + 1);
  states.push_back(0);
  for (int g = 1; g <= stats.k_up; ++g) {
    if (stats.group_nonempty(g)) states.push_back(g);
  }
  return states;
}

// sum_g N1[g] * log(alpha_g). alpha is the share of the aggregated t>=2
// sizes; with a single frame it is uniform over the states occupied at
// frame 1. Returns -inf when a group with positive frame-1 size has zero
// alpha (no prior mass).
template <class N1Fn, class NaggFn>
double alpha_exponent(int k_up, long long d_total, N1Fn n1, NaggFn n_agg) {
  double val = 0.0;
  if (d_total > 0) {
    double log_d = std::log(static_cast<double>(d_total));
    for (int g = 0; g <= k_up; ++g) {
      long long n1g = n1(g);
      if (n1g == 0) continue;
      long long ag = n_agg(g);
      if (ag == 0) return kNegInf;
      val += static_cast<double>(n1g) * (std::log(static_cast<double>(ag)) - log_d);
    }
  } else {
    long long m = 0;
    for (int g = 0; g <= k_up; ++g) m += n1(g) > 0 ? 1 : 0;
    if (m == 0) return 0.0;
    double log_m = std::log(static_cast<double>(m));
    for (int g = 0; g <= k_up; ++g) val -= static_cast<double>(n1(g)) * log_m;
  }
  return val;
}

// Dirichlet-multinomial part over the included states.
template <class RFn>
double dirmult_block(const std::vector<int>& states, const Hyperparameters& hyper, int k_up,
                     RFn r) {
  double val = 0.0;
  for (int g : states) {
    double sum_delta = 0.0;
    for (int h : states) sum_delta += hyper.delta(g, h);
    long long sum_r = 0;
    for (int h = 0; h <= k_up; ++h) sum_r += r(g, h);
    val += lgam(sum_delta) - lgam(sum_delta + static_cast<double>(sum_r));
    for (int h : states) {
      long long rv = r(g, h);
      if (rv != 0) val += lgam(hyper.delta(g, h) + static_cast<double>(rv)) - lgam(hyper.delta(g, h));
    }
  }
  return val;
}

inline long long d_total_of(const SufficientStats& stats) {
  long long d = 0;
  for (long long v : stats.n_agg) d += v;
  return d;
}

// a - b with the zero-mass sentinel semantics: two zero-mass configurations
// compare equal, escaping one is +inf, entering one is -inf.
inline double sub_safe(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) {
    if (a == b) return 0.0;
    return std::isinf(a) ? kNegInf : kPosInf;
  }
  return a - b;
}

}  // namespace

double log_icl_full(const SufficientStats& stats, const Hyperparameters& hyper) {
  if (hyper.k_up != stats.k_up)
    throw ArgumentError("hyperparameter dimension does not match stats");
  hyper.check();

  double alpha = alpha_exponent(
      stats.k_up, d_total_of(stats), [&](int g) { return stats.n1[g]; },
      [&](int g) { return stats.n_agg[g]; });
  if (std::isinf(alpha)) return kNegInf;

  auto states = included_states(stats);
  double val = alpha + dirmult_block(states, hyper, stats.k_up,
                                     [&](int g, int h) { return stats.r(g, h); });

  for (int g = 1; g <= stats.k_up; ++g) {
    for (int h = g; h <= stats.k_up; ++h) {
      val += beta_block(hyper.eta0.at(g, h), hyper.zeta0.at(g, h), stats.eta.at(g, h),
                        stats.zeta.at(g, h));
      val += beta_block(hyper.a_p.at(g, h), hyper.b_p.at(g, h), stats.u01.at(g, h),
                        stats.u00.at(g, h));
      val += beta_block(hyper.a_q.at(g, h), hyper.b_q.at(g, h), stats.u10.at(g, h),
                        stats.u11.at(g, h));
    }
  }
  return val;
}

double log_icl_delta_merge(const SufficientStats& stats, const Hyperparameters& hyper, int g,
                           int h) {
  SufficientStats merged = merged_stats(stats, g, h);
  return sub_safe(log_icl_full(merged, hyper), log_icl_full(stats, hyper));
}

namespace detail {

MoveContext::MoveContext(const SufficientStats& stats, const Hyperparameters& hyper,
                         const AdjacencyCube& cube, const AllocationMatrix& z, int t, int i)
    : stats_(stats), hyper_(hyper), t_(t), i_(i) {
  if (t < 0 || t >= cube.n_frames() || i < 0 || i >= cube.n_nodes())
    throw ArgumentError("move target outside the cube");
  g_cur_ = z(i, t);
  if (!cube.active(i, t) || g_cur_ == 0)
    throw ConsistencyError("cannot move inactive node " + std::to_string(i) + " at frame " +
                           std::to_string(t));
  z_prev_ = t > 0 ? z(i, t - 1) : -1;
  z_next_ = t + 1 < cube.n_frames() ? z(i, t + 1) : -1;
  last_frame_ = t + 1 == cube.n_frames();
  d_total_ = d_total_of(stats);

  dyads_by_group_.assign(static_cast<size_t>(stats.k_up) + 1, {});
  for (int j : cube.active_nodes(t)) {
    if (j == i) continue;
    bool x_now = cube.x(i, j, t);
    int f;
    if (t == 0 || !cube.y(i, j, t - 1)) {
      f = x_now ? kEta : kZeta;
    } else if (cube.x(i, j, t - 1)) {
      f = x_now ? kU11 : kU10;
    } else {
      f = x_now ? kU01 : kU00;
    }
    int h = z(j, t);
    auto& c = dyads_by_group_[h];
    bool fresh = c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0 && c[4] == 0 && c[5] == 0;
    if (fresh) touched_groups_.push_back(h);
    ++c[f];
  }

  alpha_exp_old_ = alpha_exponent(
      stats.k_up, d_total_, [&](int g) { return stats.n1[g]; },
      [&](int g) { return stats.n_agg[g]; });
  states_old_ = included_states(stats);

  bool group_may_die = stats.occupancy[g_cur_] == 1;
  bool group_may_be_born = false;
  for (int g = 1; g <= stats.k_up && !group_may_be_born; ++g)
    group_may_be_born = stats.occupancy[g] == 0;
  if (group_may_die || group_may_be_born) {
    dirmult_old_ = dirmult_block(states_old_, hyper, stats.k_up,
                                 [&](int g, int h) { return stats.r(g, h); });
    have_dirmult_old_ = true;
  }
}

double MoveContext::eval(int g_new) const {
  if (g_new == g_cur_) return 0.0;
  if (g_new < 1 || g_new > stats_.k_up)
    throw ArgumentError("target label " + std::to_string(g_new) + " outside 1.." +
                        std::to_string(stats_.k_up));

  // --- alpha exponent: always evaluated in full (no log-gammas involved)
  auto n1_new = [&](int g) {
    long long v = stats_.n1[g];
    if (t_ == 0) v += (g == g_new ? 1 : 0) - (g == g_cur_ ? 1 : 0);
    return v;
  };
  auto nagg_new = [&](int g) {
    long long v = stats_.n_agg[g];
    if (t_ > 0) v += (g == g_new ? 1 : 0) - (g == g_cur_ ? 1 : 0);
    return v;
  };
  double alpha_new = alpha_exponent(stats_.k_up, d_total_, n1_new, nagg_new);
  if (std::isinf(alpha_exp_old_) || std::isinf(alpha_new)) {
    // zero-mass configuration on at least one side: 0 between two such
    // states, +-inf when entering or leaving one
    return sub_safe(alpha_new, alpha_exp_old_);
  }

  double delta = alpha_new - alpha_exp_old_;

  // --- Beta-binomial blocks touched by i's frame-t dyads
  struct PairDelta {
    size_t idx;
    int a, b;
    std::array<long long, 6> d;
  };
  // small flat map keyed by the triangular index
  std::vector<PairDelta> pair_deltas;
  pair_deltas.reserve(2 * touched_groups_.size());
  auto accumulate = [&](int a, int b, int f, long long v) {
    size_t idx = stats_.eta.index(a, b);
    for (auto& pd : pair_deltas) {
      if (pd.idx == idx) {
        pd.d[f] += v;
        return;
      }
    }
    PairDelta pd{idx, a, b, {}};
    pd.d[f] = v;
    pair_deltas.push_back(pd);
  };
  for (int h : touched_groups_) {
    const auto& c = dyads_by_group_[h];
    for (int f = 0; f < 6; ++f) {
      if (c[f] != 0) {
        accumulate(g_cur_, h, f, -c[f]);
        accumulate(g_new, h, f, c[f]);
      }
    }
  }
  for (const auto& pd : pair_deltas) {
    int a = pd.a, b = pd.b;
    if (pd.d[kEta] != 0 || pd.d[kZeta] != 0) {
      long long s = stats_.eta.at(a, b), f = stats_.zeta.at(a, b);
      delta += beta_block(hyper_.eta0.at(a, b), hyper_.zeta0.at(a, b), s + pd.d[kEta],
                          f + pd.d[kZeta]) -
               beta_block(hyper_.eta0.at(a, b), hyper_.zeta0.at(a, b), s, f);
    }
    if (pd.d[kU01] != 0 || pd.d[kU00] != 0) {
      long long s = stats_.u01.at(a, b), f = stats_.u00.at(a, b);
      delta += beta_block(hyper_.a_p.at(a, b), hyper_.b_p.at(a, b), s + pd.d[kU01],
                          f + pd.d[kU00]) -
               beta_block(hyper_.a_p.at(a, b), hyper_.b_p.at(a, b), s, f);
    }
    if (pd.d[kU10] != 0 || pd.d[kU11] != 0) {
      long long s = stats_.u10.at(a, b), f = stats_.u11.at(a, b);
      delta += beta_block(hyper_.a_q.at(a, b), hyper_.b_q.at(a, b), s + pd.d[kU10],
                          f + pd.d[kU11]) -
               beta_block(hyper_.a_q.at(a, b), hyper_.b_q.at(a, b), s, f);
    }
  }

  // --- label transition entries touched by the move
  struct RDelta {
    int a, b;
    long long d;
  };
  std::array<RDelta, 4> r_deltas;
  int n_r = 0;
  auto accumulate_r = [&](int a, int b, long long v) {
    for (int k = 0; k < n_r; ++k) {
      if (r_deltas[k].a == a && r_deltas[k].b == b) {
        r_deltas[k].d += v;
        return;
      }
    }
    r_deltas[n_r++] = {a, b, v};
  };
  if (t_ > 0) {
    accumulate_r(z_prev_, g_cur_, -1);
    accumulate_r(z_prev_, g_new, 1);
  }
  if (!last_frame_) {
    accumulate_r(g_cur_, z_next_, -1);
    accumulate_r(g_new, z_next_, 1);
  }

  bool s_changes = stats_.occupancy[g_cur_] == 1 || stats_.occupancy[g_new] == 0;
  if (s_changes) {
    assert(have_dirmult_old_);
    // group death/birth: the state set and every Dirichlet row sum change
    auto r_new = [&](int a, int b) {
      long long v = stats_.r(a, b);
      for (int k = 0; k < n_r; ++k) {
        if (r_deltas[k].a == a && r_deltas[k].b == b) v += r_deltas[k].d;
      }
      return v;
    };
    std::vector<int> states_new;
    states_new.reserve(states_old_.size() + 1);
    for (int s : states_old_) {
      if (s == g_cur_ && stats_.occupancy[g_cur_] == 1) continue;
      states_new.push_back(s);
    }
    if (stats_.occupancy[g_new] == 0) {
      states_new.insert(std::upper_bound(states_new.begin(), states_new.end(), g_new), g_new);
    }
    delta += dirmult_block(states_new, hyper_, stats_.k_up, r_new) - dirmult_old_;
  } else {
    for (int k = 0; k < n_r; ++k) {
      const auto& rd = r_deltas[k];
      if (rd.d == 0) continue;
      double dd = hyper_.delta(rd.a, rd.b);
      long long rv = stats_.r(rd.a, rd.b);
      delta += lgam(dd + static_cast<double>(rv + rd.d)) - lgam(dd + static_cast<double>(rv));
    }
    if (!last_frame_) {
      // outgoing-transition row totals of g_cur and g_new shift by one
      auto row_term_delta = [&](int row, long long d) {
        double sum_delta = 0.0;
        for (int h : included_states_unchanged()) sum_delta += hyper_.delta(row, h);
        long long sum_r = 0;
        for (int h = 0; h <= stats_.k_up; ++h) sum_r += stats_.r(row, h);
        return -lgam(sum_delta + static_cast<double>(sum_r + d)) +
               lgam(sum_delta + static_cast<double>(sum_r));
      };
      delta += row_term_delta(g_cur_, -1);
      delta += row_term_delta(g_new, 1);
    }
  }
  return delta;
}

}  // namespace detail

double log_icl_delta_move(const SufficientStats& stats, const Hyperparameters& hyper,
                          const AdjacencyCube& cube, const AllocationMatrix& z, int t, int i,
                          int g_new) {
  detail::MoveContext ctx(stats, hyper, cube, z, t, i);
  return ctx.eval(g_new);
}

}  // namespace sbtm
