#include "sbtm/greedy.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "sbtm/errors.hpp"
#include "sbtm/rng.hpp"

namespace sbtm {

namespace {

// stopping-rule guard against floating-point noise
constexpr double kImprovementTol = 1e-12;

std::vector<std::pair<int, int>> active_entries(const AdjacencyCube& cube) {
  std::vector<std::pair<int, int>> entries;
  for (int t = 0; t < cube.n_frames(); ++t) {
    for (int i : cube.active_nodes(t)) entries.emplace_back(t, i);
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Lloyd's k-means with k-means++ seeding over dense profile vectors.

double sq_dist(const double* a, const double* b, int dim) {
  double d = 0.0;
  for (int k = 0; k < dim; ++k) {
    double diff = a[k] - b[k];
    d += diff * diff;
  }
  return d;
}

std::vector<int> kmeans(const std::vector<double>& points, int n_points, int dim, int k,
                        Rng& rng) {
  std::vector<int> assign(n_points, 0);
  if (n_points == 0 || k <= 1) return assign;
  k = std::min(k, n_points);

  // k-means++ seeding
  std::vector<double> centroids(static_cast<size_t>(k) * dim);
  std::vector<double> d2(n_points);
  int first = static_cast<int>(rng.next_below(n_points));
  std::copy_n(&points[static_cast<size_t>(first) * dim], dim, centroids.begin());
  for (int p = 0; p < n_points; ++p)
    d2[p] = sq_dist(&points[static_cast<size_t>(p) * dim], centroids.data(), dim);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    int pick;
    if (total > 0.0) {
      double u = rng.next_double() * total;
      double acc = 0.0;
      pick = n_points - 1;
      for (int p = 0; p < n_points; ++p) {
        acc += d2[p];
        if (u < acc) {
          pick = p;
          break;
        }
      }
    } else {
      // fewer distinct profiles than clusters; duplicates collapse later
      pick = static_cast<int>(rng.next_below(n_points));
    }
    double* cent = &centroids[static_cast<size_t>(c) * dim];
    std::copy_n(&points[static_cast<size_t>(pick) * dim], dim, cent);
    for (int p = 0; p < n_points; ++p) {
      double d = sq_dist(&points[static_cast<size_t>(p) * dim], cent, dim);
      d2[p] = std::min(d2[p], d);
    }
  }

  std::vector<long long> counts(k);
  std::vector<double> sums(static_cast<size_t>(k) * dim);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (int p = 0; p < n_points; ++p) {
      const double* pt = &points[static_cast<size_t>(p) * dim];
      int best = 0;
      double best_d = sq_dist(pt, centroids.data(), dim);
      for (int c = 1; c < k; ++c) {
        double d = sq_dist(pt, &centroids[static_cast<size_t>(c) * dim], dim);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[p] != best) {
        assign[p] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    std::fill(counts.begin(), counts.end(), 0);
    std::fill(sums.begin(), sums.end(), 0.0);
    for (int p = 0; p < n_points; ++p) {
      int c = assign[p];
      ++counts[c];
      const double* pt = &points[static_cast<size_t>(p) * dim];
      double* s = &sums[static_cast<size_t>(c) * dim];
      for (int d = 0; d < dim; ++d) s[d] += pt[d];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      double* cent = &centroids[static_cast<size_t>(c) * dim];
      for (int d = 0; d < dim; ++d) cent[d] = sums[static_cast<size_t>(c) * dim + d] / counts[c];
    }
  }
  return assign;
}

}  // namespace

AllocationMatrix init_random(const AdjacencyCube& cube, int k_up, uint64_t seed) {
  if (k_up < 1) throw ArgumentError("k_up must be at least 1");
  AllocationMatrix z(cube.n_nodes(), cube.n_frames(), k_up);
  Rng rng(seed);
  for (int t = 0; t < cube.n_frames(); ++t) {
    for (int i : cube.active_nodes(t)) {
      z.set(i, t, 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(k_up))));
    }
  }
  return z;
}

AllocationMatrix init_kmeans_profile(const AdjacencyCube& cube, int k_up, uint64_t seed) {
  if (k_up < 1) throw ArgumentError("k_up must be at least 1");
  const int n = cube.n_nodes();
  auto entries = active_entries(cube);
  int n_points = static_cast<int>(entries.size());

  // profile of (t,i): adjacency row at t aggregated with the row at t-1
  std::vector<double> points(static_cast<size_t>(n_points) * n, 0.0);
  for (int p = 0; p < n_points; ++p) {
    auto [t, i] = entries[p];
    double* row = &points[static_cast<size_t>(p) * n];
    for (int j : cube.neighbors(i, t)) row[j] += 1.0;
    if (t > 0) {
      for (int j : cube.neighbors(i, t - 1)) row[j] += 1.0;
    }
  }

  Rng rng(seed);
  auto assign = kmeans(points, n_points, n, k_up, rng);

  AllocationMatrix z(n, cube.n_frames(), k_up);
  for (int p = 0; p < n_points; ++p) {
    auto [t, i] = entries[p];
    z.set(i, t, assign[p] + 1);
  }
  return z;
}

GreedyState::GreedyState(const AdjacencyCube& c, const Hyperparameters& h, AllocationMatrix z0)
    : cube(&c), hyper(h), z(std::move(z0)) {
  stats = compute_stats(*cube, z);
  log_icl = log_icl_full(stats, hyper);
}

bool greedy_sweep(GreedyState& state, uint64_t order_seed, std::vector<double>* applied_deltas) {
  const AdjacencyCube& cube = *state.cube;
  const int k_up = state.z.k_up();
  auto order = active_entries(cube);
  Rng rng(order_seed);
  rng.shuffle(order);

  double l_before = state.log_icl;
  for (auto [t, i] : order) {
    detail::MoveContext ctx(state.stats, state.hyper, cube, state.z, t, i);
    const int g_cur = ctx.current_label();
    int best_g = g_cur;
    double best_d = 0.0;  // the current label always ties at 0; kept on ties
    for (int g = 1; g <= k_up; ++g) {
      if (g == g_cur) continue;
      double d = ctx.eval(g);
      if (d > best_d) {
        best_d = d;
        best_g = g;
      }
    }
    if (best_g != g_cur) {
      apply_move(state.stats, cube, state.z, t, i, best_g);
      if (std::isfinite(best_d) && std::isfinite(state.log_icl)) {
        state.log_icl += best_d;
      } else {
        state.log_icl = log_icl_full(state.stats, state.hyper);
      }
      if (applied_deltas) applied_deltas->push_back(best_d);
    }
  }
  return state.log_icl > l_before;
}

void merge_phase(GreedyState& state, std::vector<double>* applied_deltas) {
  for (;;) {
    std::vector<int> labels;
    for (int g = 1; g <= state.stats.k_up; ++g) {
      if (state.stats.group_nonempty(g)) labels.push_back(g);
    }
    if (labels.size() < 2) return;

    int best_g = -1, best_h = -1;
    double best_delta = 0.0, best_l = 0.0;
    for (size_t a = 0; a < labels.size(); ++a) {
      for (size_t b = a + 1; b < labels.size(); ++b) {
        SufficientStats merged = merged_stats(state.stats, labels[a], labels[b]);
        double l_merged = log_icl_full(merged, state.hyper);
        double delta;
        if (std::isinf(l_merged) || std::isinf(state.log_icl)) {
          delta = l_merged == state.log_icl
                      ? 0.0
                      : (std::isinf(l_merged) ? -std::numeric_limits<double>::infinity()
                                              : std::numeric_limits<double>::infinity());
        } else {
          delta = l_merged - state.log_icl;
        }
        if (delta > best_delta) {
          best_delta = delta;
          best_l = l_merged;
          best_g = labels[a];
          best_h = labels[b];
        }
      }
    }
    if (best_g < 0 || !(best_delta > kImprovementTol)) return;

    state.stats = merged_stats(state.stats, best_g, best_h);
    for (int t = 0; t < state.z.n_frames(); ++t) {
      for (int i = 0; i < state.z.n_nodes(); ++i) {
        if (state.z(i, t) == best_h) state.z.set(i, t, best_g);
      }
    }
    state.log_icl = best_l;
    if (applied_deltas) applied_deltas->push_back(best_delta);
  }
}

namespace {

struct RestartOutcome {
  AllocationMatrix z;
  double log_icl = 0.0;
  int k_hat = 0;
  int n_sweeps = 0;
};

RestartOutcome run_restart(const AdjacencyCube& cube, const Hyperparameters& hyper,
                           const FitConfig& config, int restart) {
  uint64_t init_seed = derive_seed(config.seed, 1, static_cast<uint64_t>(restart));
  AllocationMatrix z0 = config.init == InitMethod::random
                            ? init_random(cube, config.k_up, init_seed)
                            : init_kmeans_profile(cube, config.k_up, init_seed);
  GreedyState state(cube, hyper, std::move(z0));

  int sweeps = 0;
  auto sweep_until_stable = [&]() {
    double l_stop = state.log_icl;
    while (sweeps < config.max_sweeps) {
      uint64_t sweep_seed =
          derive_seed(config.seed, 2, static_cast<uint64_t>(restart), static_cast<uint64_t>(sweeps));
      greedy_sweep(state, sweep_seed);
      ++sweeps;
      if (!(state.log_icl > l_stop + kImprovementTol)) break;
      l_stop = state.log_icl;
    }
  };

  sweep_until_stable();
  merge_phase(state);
  if (config.resweep_after_merge) {
    while (sweeps < config.max_sweeps) {
      double before = state.log_icl;
      sweep_until_stable();
      merge_phase(state);
      if (!(state.log_icl > before + kImprovementTol)) break;
    }
  }

  state.z.compact_labels();
  SufficientStats final_stats = compute_stats(cube, state.z);
  RestartOutcome out{std::move(state.z), log_icl_full(final_stats, hyper),
                     final_stats.n_groups(), sweeps};
  return out;
}

}  // namespace

FitResult fit(const AdjacencyCube& cube, const Hyperparameters& hyper, const FitConfig& config) {
  if (config.k_up < 1) throw ArgumentError("k_up must be at least 1");
  if (config.n_restarts < 1) throw ArgumentError("n_restarts must be at least 1");
  if (config.max_sweeps < 1) throw ArgumentError("max_sweeps must be at least 1");
  if (hyper.k_up != config.k_up)
    throw ArgumentError("hyperparameters must be sized for k_up");
  hyper.check();

  auto t0 = std::chrono::steady_clock::now();

  std::vector<RestartOutcome> outcomes(config.n_restarts);
  int n_threads = config.n_threads > 0
                      ? config.n_threads
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min(n_threads, config.n_restarts);

  if (n_threads <= 1) {
    for (int r = 0; r < config.n_restarts; ++r) outcomes[r] = run_restart(cube, hyper, config, r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          int r = next.fetch_add(1);
          if (r >= config.n_restarts) return;
          outcomes[r] = run_restart(cube, hyper, config, r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // best objective; ties broken by fewer groups, then by restart order
  int best = 0;
  for (int r = 1; r < config.n_restarts; ++r) {
    const auto& a = outcomes[r];
    const auto& b = outcomes[best];
    if (a.log_icl > b.log_icl ||
        (a.log_icl == b.log_icl && a.k_hat < b.k_hat)) {
      best = r;
    }
  }

  auto t1 = std::chrono::steady_clock::now();
  FitResult result;
  result.z_hat = std::move(outcomes[best].z);
  result.log_icl = outcomes[best].log_icl;
  result.k_hat = outcomes[best].k_hat;
  result.n_sweeps = outcomes[best].n_sweeps;
  result.restart_index = best;
  result.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

}  // namespace sbtm
