#include "sbtm/generative.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sbtm/errors.hpp"
#include "sbtm/rng.hpp"

namespace sbtm {

namespace {

constexpr double kRowTol = 1e-12;

void normalise_row(std::vector<double>& row) {
  double s = 0.0;
  for (double v : row) s += v;
  if (!(s > 0.0)) throw ArgumentError("probability row sums to zero");
  for (double& v : row) v /= s;
}

}  // namespace

void ModelParameters::check() const {
  if (k < 1) throw ArgumentError("k must be at least 1");
  auto check_probs = [](const BlockPairs<double>& m, const char* name) {
    for (double v : m.data()) {
      if (!(v >= 0.0 && v <= 1.0))
        throw ArgumentError(std::string(name) + " entries must lie in [0,1]");
    }
  };
  check_probs(theta, "theta");
  check_probs(p, "p");
  check_probs(q, "q");
  if (pi.rows() != k + 1 || pi.cols() != k + 1) throw ArgumentError("pi must be (k+1)x(k+1)");
  for (int g = 0; g <= k; ++g) {
    double s = 0.0;
    for (int h = 0; h <= k; ++h) {
      double v = pi(g, h);
      if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("pi entries must lie in [0,1]");
      s += v;
    }
    if (std::abs(s - 1.0) > kRowTol)
      throw ArgumentError("pi row " + std::to_string(g) + " does not sum to 1");
  }
  if (static_cast<int>(alpha.size()) != k + 1) throw ArgumentError("alpha must have length k+1");
  double s = 0.0;
  for (double v : alpha) {
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("alpha entries must lie in [0,1]");
    s += v;
  }
  if (std::abs(s - 1.0) > kRowTol) throw ArgumentError("alpha does not sum to 1");
}

std::vector<double> ModelParameters::stationary() const {
  std::vector<double> v(k + 1, 1.0 / (k + 1));
  std::vector<double> next(k + 1);
  for (int iter = 0; iter < 200000; ++iter) {
    double diff = 0.0;
    for (int h = 0; h <= k; ++h) {
      double s = 0.0;
      for (int g = 0; g <= k; ++g) s += v[g] * pi(g, h);
      next[h] = s;
    }
    normalise_row(next);
    for (int h = 0; h <= k; ++h) diff = std::max(diff, std::abs(next[h] - v[h]));
    v.swap(next);
    if (diff < 1e-12) break;
  }
  return v;
}

ModelParameters sample_params(int k, const Hyperparameters& hyper, uint64_t seed) {
  if (k < 1) throw ArgumentError("k must be at least 1");
  if (hyper.k_up < k) throw ArgumentError("hyperparameters are too small for k groups");
  hyper.check();

  ModelParameters params;
  params.k = k;
  params.theta = BlockPairs<double>(k);
  params.p = BlockPairs<double>(k);
  params.q = BlockPairs<double>(k);
  params.pi = Matrix<double>(k + 1, k + 1);

  Rng rng(derive_seed(seed, 11));
  for (int g = 0; g <= k; ++g) {
    std::vector<double> conc(k + 1);
    for (int h = 0; h <= k; ++h) conc[h] = hyper.delta(g, h);
    auto row = rng.next_dirichlet(conc);
    for (int h = 0; h <= k; ++h) params.pi(g, h) = row[h];
  }
  for (int g = 1; g <= k; ++g) {
    for (int h = g; h <= k; ++h) {
      params.theta.at(g, h) = rng.next_beta(hyper.eta0.at(g, h), hyper.zeta0.at(g, h));
      params.p.at(g, h) = rng.next_beta(hyper.a_p.at(g, h), hyper.b_p.at(g, h));
      params.q.at(g, h) = rng.next_beta(hyper.a_q.at(g, h), hyper.b_q.at(g, h));
    }
  }
  params.alpha = params.stationary();
  params.check();
  return params;
}

AllocationMatrix sample_allocations(int n_nodes, int n_frames, const ModelParameters& params,
                                    uint64_t seed) {
  params.check();
  AllocationMatrix z(n_nodes, n_frames, params.k);
  Rng rng(derive_seed(seed, 13));
  std::vector<double> row(params.k + 1);
  for (int i = 0; i < n_nodes; ++i) {
    int state = rng.next_categorical(params.alpha);
    z.set(i, 0, state);
    for (int t = 1; t < n_frames; ++t) {
      for (int h = 0; h <= params.k; ++h) row[h] = params.pi(state, h);
      state = rng.next_categorical(row);
      z.set(i, t, state);
    }
  }
  return z;
}

AdjacencyCube sample_edges(const AllocationMatrix& z, const ModelParameters& params,
                           uint64_t seed, SufficientStats* regime_tally) {
  params.check();
  const int n = z.n_nodes();
  const int t_frames = z.n_frames();

  NodeActivity activity(n, t_frames);
  for (int t = 0; t < t_frames; ++t) {
    for (int i = 0; i < n; ++i) activity.set(i, t, z(i, t) != 0);
  }

  if (regime_tally) *regime_tally = SufficientStats(params.k, n, t_frames);

  Rng rng(derive_seed(seed, 17));
  std::vector<FrameEdge> edges;
  // previous frame's x as a dense bitmap (dyads are revisited in order)
  std::vector<uint8_t> x_prev(static_cast<size_t>(n) * n, 0), x_now(x_prev.size(), 0);
  auto at = [n](std::vector<uint8_t>& v, int i, int j) -> uint8_t& {
    return v[static_cast<size_t>(i) * n + j];
  };

  for (int t = 0; t < t_frames; ++t) {
    std::fill(x_now.begin(), x_now.end(), 0);
    for (int i = 0; i < n; ++i) {
      int gi = z(i, t);
      if (gi == 0) continue;
      for (int j = i + 1; j < n; ++j) {
        int gj = z(j, t);
        if (gj == 0) continue;
        bool prev_observed = t > 0 && z(i, t - 1) != 0 && z(j, t - 1) != 0;
        bool edge;
        int family;
        if (!prev_observed) {
          edge = rng.next_bernoulli(params.theta.at(gi, gj));
          family = edge ? 0 : 1;  // eta : zeta
        } else if (at(x_prev, i, j)) {
          edge = !rng.next_bernoulli(params.q.at(gi, gj));
          family = edge ? 5 : 4;  // u11 : u10
        } else {
          edge = rng.next_bernoulli(params.p.at(gi, gj));
          family = edge ? 2 : 3;  // u01 : u00
        }
        if (edge) {
          at(x_now, i, j) = 1;
          edges.push_back({t, i, j});
        }
        if (regime_tally) {
          BlockPairs<long long>* m[6] = {&regime_tally->eta, &regime_tally->zeta,
                                         &regime_tally->u01, &regime_tally->u00,
                                         &regime_tally->u10, &regime_tally->u11};
          m[family]->at(gi, gj) += 1;
        }
      }
    }
    x_prev.swap(x_now);
  }

  if (regime_tally) {
    for (int i = 0; i < n; ++i) {
      regime_tally->n1[z(i, 0)] += 1;
      for (int t = 1; t < t_frames; ++t) {
        regime_tally->r(z(i, t - 1), z(i, t)) += 1;
        regime_tally->n_agg[z(i, t)] += 1;
      }
    }
    for (int g = 0; g <= params.k; ++g)
      regime_tally->occupancy[g] = regime_tally->n1[g] + regime_tally->n_agg[g];
  }

  return AdjacencyCube(n, t_frames, std::move(edges), std::move(activity));
}

SimOutput simulate(int n_nodes, int n_frames, int k, const Hyperparameters& hyper,
                   uint64_t seed) {
  ModelParameters params = sample_params(k, hyper, derive_seed(seed, 1));
  return simulate(n_nodes, n_frames, params, derive_seed(seed, 2));
}

SimOutput simulate(int n_nodes, int n_frames, const ModelParameters& params, uint64_t seed) {
  if (n_nodes < 1 || n_frames < 1) throw ArgumentError("simulation dimensions must be positive");
  AllocationMatrix z = sample_allocations(n_nodes, n_frames, params, derive_seed(seed, 3));
  SufficientStats tally;
  AdjacencyCube cube = sample_edges(z, params, derive_seed(seed, 4), &tally);
  return SimOutput{std::move(cube), std::move(z), params, std::move(tally)};
}

ModelParameters without_inactivity(ModelParameters params) {
  for (int g = 0; g <= params.k; ++g) {
    std::vector<double> row(params.k + 1);
    for (int h = 0; h <= params.k; ++h) row[h] = params.pi(g, h);
    row[0] = 0.0;
    if (g == 0) {
      // never entered; an absorbing self-loop keeps pi stochastic
      std::fill(row.begin(), row.end(), 0.0);
      row[0] = 1.0;
    }
    normalise_row(row);
    for (int h = 0; h <= params.k; ++h) params.pi(g, h) = row[h];
  }
  params.alpha[0] = 0.0;
  normalise_row(params.alpha);
  params.check();
  return params;
}

ModelParameters benchmark_params() {
  ModelParameters params;
  params.k = 3;
  params.theta = BlockPairs<double>(3, 0.1);
  params.p = BlockPairs<double>(3, 0.1);
  params.q = BlockPairs<double>(3, 0.1);
  params.theta.at(1, 1) = params.theta.at(2, 2) = params.theta.at(3, 3) = 0.9;
  params.p.at(1, 1) = params.p.at(2, 2) = 0.9;  // group 3 creates edges rarely
  params.q.at(2, 2) = params.q.at(3, 3) = 0.9;  // group 1 destroys edges rarely
  params.pi = Matrix<double>(4, 4, 0.0);
  params.pi(0, 0) = 1.0;  // inactivity never entered
  for (int g = 1; g <= 3; ++g) {
    for (int h = 1; h <= 3; ++h) params.pi(g, h) = g == h ? 0.8 : 0.1;
  }
  params.alpha = {0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3};
  params.check();
  return params;
}

// ---------------------------------------------------------------------------
// Parameter file format: whitespace-separated tokens. `k <int>` must come
// first; `theta`/`p`/`q` are followed by k*k row-major entries, `pi` by
// (k+1)^2 entries and `alpha` by k+1 entries. `#` starts a comment line.
// Asymmetric theta/p/q inputs are rejected; pi rows and alpha are
// renormalised to compensate for truncated decimal input.

void ModelParameters::write(std::ostream& os) const {
  os.precision(17);
  os << "k " << k << '\n';
  auto write_pairs = [&](const char* name, const BlockPairs<double>& m) {
    os << name << '\n';
    for (int g = 1; g <= k; ++g) {
      for (int h = 1; h <= k; ++h) os << (h > 1 ? " " : "") << m.at(g, h);
      os << '\n';
    }
  };
  write_pairs("theta", theta);
  write_pairs("p", p);
  write_pairs("q", q);
  os << "pi\n";
  for (int g = 0; g <= k; ++g) {
    for (int h = 0; h <= k; ++h) os << (h > 0 ? " " : "") << pi(g, h);
    os << '\n';
  }
  os << "alpha\n";
  for (int h = 0; h <= k; ++h) os << (h > 0 ? " " : "") << alpha[h];
  os << '\n';
}

void ModelParameters::write_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  write(os);
}

ModelParameters ModelParameters::read(std::istream& is, const std::string& name) {
  // strip comments, then tokenise
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') continue;
    cleaned << line << '\n';
  }
  std::istringstream tokens(cleaned.str());

  ModelParameters params;
  std::string word;
  if (!(tokens >> word) || word != "k" || !(tokens >> params.k) || params.k < 1)
    throw InputError(name + ": parameter file must start with `k <groups>`");
  const int k = params.k;
  params.theta = BlockPairs<double>(k);
  params.p = BlockPairs<double>(k);
  params.q = BlockPairs<double>(k);
  params.pi = Matrix<double>(k + 1, k + 1);
  params.alpha.assign(k + 1, 0.0);
  bool have_theta = false, have_p = false, have_q = false, have_pi = false, have_alpha = false;

  auto read_pairs = [&](BlockPairs<double>& m, const std::string& key) {
    Matrix<double> full(k, k);
    for (int g = 0; g < k; ++g) {
      for (int h = 0; h < k; ++h) {
        if (!(tokens >> full(g, h)))
          throw InputError(name + ": expected " + std::to_string(k * k) + " entries for " + key);
      }
    }
    for (int g = 0; g < k; ++g) {
      for (int h = g; h < k; ++h) {
        if (std::abs(full(g, h) - full(h, g)) > 1e-9)
          throw InputError(name + ": " + key + " must be symmetric");
        m.at(g + 1, h + 1) = full(g, h);
      }
    }
  };

  while (tokens >> word) {
    if (word == "theta") {
      read_pairs(params.theta, word);
      have_theta = true;
    } else if (word == "p") {
      read_pairs(params.p, word);
      have_p = true;
    } else if (word == "q") {
      read_pairs(params.q, word);
      have_q = true;
    } else if (word == "pi") {
      for (int g = 0; g <= k; ++g) {
        std::vector<double> row(k + 1);
        for (int h = 0; h <= k; ++h) {
          if (!(tokens >> row[h])) throw InputError(name + ": truncated pi matrix");
        }
        normalise_row(row);
        for (int h = 0; h <= k; ++h) params.pi(g, h) = row[h];
      }
      have_pi = true;
    } else if (word == "alpha") {
      for (int h = 0; h <= k; ++h) {
        if (!(tokens >> params.alpha[h])) throw InputError(name + ": truncated alpha vector");
      }
      normalise_row(params.alpha);
      have_alpha = true;
    } else {
      throw InputError(name + ": unknown key `" + word + "`");
    }
  }
  if (!have_theta || !have_p || !have_q || !have_pi)
    throw InputError(name + ": theta, p, q and pi are all required");
  if (!have_alpha) params.alpha = params.stationary();
  params.check();
  return params;
}

ModelParameters ModelParameters::read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open parameter file " + path);
  return read(is, path);
}

}  // namespace sbtm
