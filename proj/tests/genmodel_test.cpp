#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sbtm/errors.hpp"
#include "sbtm/generative.hpp"
#include "sbtm/icl.hpp"
#include "support/close.hpp"
#include "support/oracles.hpp"

using namespace sbtm;

TEST_CASE("sample_params: prior means match Beta(0.5,0.5) within 3 sigma") {
  const int draws = 10000;
  double sum = 0.0;
  for (int d = 0; d < draws; ++d) {
    auto params = sample_params(2, Hyperparameters::jeffreys(2), 1000 + d);
    sum += params.theta.at(1, 2);
  }
  double mean = sum / draws;
  // Beta(0.5,0.5): mean 1/2, variance 1/8
  double sigma = std::sqrt(0.125 / draws);
  CHECK(std::abs(mean - 0.5) <= 3.0 * sigma);
}

TEST_CASE("sample_params rejects nonpositive hyperparameters") {
  auto hyper = Hyperparameters::jeffreys(2);
  hyper.delta(1, 0) = 0.0;
  CHECK_THROWS_AS(sample_params(2, hyper, 1), ArgumentError);
}

TEST_CASE("sample_params is deterministic in the seed") {
  auto a = sample_params(3, Hyperparameters::jeffreys(3), 42);
  auto b = sample_params(3, Hyperparameters::jeffreys(3), 42);
  CHECK(a.theta == b.theta);
  CHECK(a.pi == b.pi);
  CHECK(a.alpha == b.alpha);
}

TEST_CASE("sample_allocations: identity transition matrix freezes labels") {
  ModelParameters params;
  params.k = 2;
  params.theta = BlockPairs<double>(2, 0.5);
  params.p = BlockPairs<double>(2, 0.5);
  params.q = BlockPairs<double>(2, 0.5);
  params.pi = Matrix<double>(3, 3, 0.0);
  for (int g = 0; g <= 2; ++g) params.pi(g, g) = 1.0;
  params.alpha = {0.2, 0.4, 0.4};
  auto z = sample_allocations(30, 10, params, 7);
  for (int i = 0; i < 30; ++i) {
    for (int t = 1; t < 10; ++t) CHECK(z(i, t) == z(i, 0));
  }
}

TEST_CASE("sample_allocations: benchmark self-transition frequency is 0.8") {
  auto params = benchmark_params();
  auto z = sample_allocations(100, 50, params, 21);
  long long stays = 0, transitions = 0;
  for (int i = 0; i < 100; ++i) {
    for (int t = 1; t < 50; ++t) {
      ++transitions;
      stays += z(i, t) == z(i, t - 1) ? 1 : 0;
    }
  }
  double freq = static_cast<double>(stays) / transitions;
  double sigma = std::sqrt(0.8 * 0.2 / transitions);
  CHECK(std::abs(freq - 0.8) <= 3.0 * sigma);
  // no node ever inactive in this regime
  for (int i = 0; i < 100; ++i)
    for (int t = 0; t < 50; ++t) CHECK(z(i, t) != 0);
}

TEST_CASE("sample_allocations occupancy approaches the stationary distribution") {
  auto params = sample_params(3, Hyperparameters::jeffreys(3), 33);
  auto stationary = params.stationary();
  const int n = 200, t_frames = 400;
  auto z = sample_allocations(n, t_frames, params, 11);
  std::vector<long long> counts(4, 0);
  long long total = 0;
  for (int t = t_frames / 2; t < t_frames; ++t) {
    for (int i = 0; i < n; ++i) {
      ++counts[z(i, t)];
      ++total;
    }
  }
  for (int g = 0; g <= 3; ++g) {
    double freq = static_cast<double>(counts[g]) / static_cast<double>(total);
    // generous Monte-Carlo band: draws are correlated across frames
    CHECK(std::abs(freq - stationary[g]) < 0.05);
  }
}

TEST_CASE("sample_edges: degenerate probabilities produce no edges") {
  ModelParameters params;
  params.k = 1;
  params.theta = BlockPairs<double>(1, 0.0);
  params.p = BlockPairs<double>(1, 0.0);
  params.q = BlockPairs<double>(1, 1.0);
  params.pi = Matrix<double>(2, 2, 0.0);
  params.pi(0, 0) = 1.0;
  params.pi(1, 1) = 1.0;
  params.alpha = {0.0, 1.0};
  auto z = sample_allocations(10, 6, params, 3);
  auto cube = sample_edges(z, params, 4);
  CHECK(cube.n_edges() == 0);
}

TEST_CASE("sample_edges: theta=1 gives a complete first frame") {
  ModelParameters params;
  params.k = 1;
  params.theta = BlockPairs<double>(1, 1.0);
  params.p = BlockPairs<double>(1, 0.5);
  params.q = BlockPairs<double>(1, 0.5);
  params.pi = Matrix<double>(2, 2, 0.0);
  params.pi(0, 0) = 1.0;
  params.pi(1, 1) = 1.0;
  params.alpha = {0.0, 1.0};
  auto z = sample_allocations(8, 3, params, 5);
  auto cube = sample_edges(z, params, 6);
  CHECK(static_cast<long long>(cube.frame_edges(0).size()) == 8 * 7 / 2);
}

TEST_CASE("sample_edges: benchmark persistence and creation frequencies") {
  auto params = benchmark_params();
  // static groups so every within-group dyad persists frame to frame
  params.pi = Matrix<double>(4, 4, 0.0);
  for (int g = 0; g <= 3; ++g) params.pi(g, g) = 1.0;
  params.alpha = {0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3};

  long long kept_g1 = 0, persist_trials_g1 = 0;
  long long created_g3 = 0, create_trials_g3 = 0;
  for (int rep = 0; rep < 30; ++rep) {
    SufficientStats tally;
    auto z = sample_allocations(30, 20, params, derive_seed(100, rep));
    auto cube = sample_edges(z, params, derive_seed(101, rep), &tally);
    (void)cube;
    kept_g1 += tally.u11.at(1, 1);
    persist_trials_g1 += tally.u11.at(1, 1) + tally.u10.at(1, 1);
    created_g3 += tally.u01.at(3, 3);
    create_trials_g3 += tally.u01.at(3, 3) + tally.u00.at(3, 3);
  }
  REQUIRE(persist_trials_g1 > 100);
  REQUIRE(create_trials_g3 > 100);
  double keep_freq = static_cast<double>(kept_g1) / persist_trials_g1;
  double keep_sigma = std::sqrt(0.9 * 0.1 / persist_trials_g1);
  CHECK(std::abs(keep_freq - 0.9) <= 3.0 * keep_sigma);  // 1 - Q_11
  double create_freq = static_cast<double>(created_g3) / create_trials_g3;
  double create_sigma = std::sqrt(0.1 * 0.9 / create_trials_g3);
  CHECK(std::abs(create_freq - 0.1) <= 3.0 * create_sigma);  // P_33
}

TEST_CASE("simulated cubes validate and the regime tally matches compute_stats") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto sim = simulate(20, 8, 3, Hyperparameters::jeffreys(3), seed);
    CHECK(validate(sim.cube).ok());
    CHECK(validate(to_dense(sim.cube)).ok());
    auto stats = compute_stats(sim.cube, sim.z_true);
    CHECK(stats.eta == sim.regime_tally.eta);
    CHECK(stats.zeta == sim.regime_tally.zeta);
    CHECK(stats.u01 == sim.regime_tally.u01);
    CHECK(stats.u00 == sim.regime_tally.u00);
    CHECK(stats.u10 == sim.regime_tally.u10);
    CHECK(stats.u11 == sim.regime_tally.u11);
    CHECK(stats.r == sim.regime_tally.r);
    CHECK(stats.n1 == sim.regime_tally.n1);
    CHECK(stats.n_agg == sim.regime_tally.n_agg);
  }
}

TEST_CASE("block success rates converge to theta across replicates") {
  auto hyper = Hyperparameters::jeffreys(2);
  auto params = sample_params(2, hyper, 77);
  long long eta_total = 0, trials = 0;
  for (int rep = 0; rep < 40; ++rep) {
    auto sim = simulate(25, 10, params, derive_seed(200, rep));
    eta_total += sim.regime_tally.eta.at(1, 2);
    trials += sim.regime_tally.eta.at(1, 2) + sim.regime_tally.zeta.at(1, 2);
  }
  REQUIRE(trials > 300);
  double p = params.theta.at(1, 2);
  double freq = static_cast<double>(eta_total) / trials;
  double sigma = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(freq - p) <= 3.0 * sigma);
}

TEST_CASE("without_inactivity removes all state-0 mass") {
  auto params = sample_params(3, Hyperparameters::jeffreys(3), 5);
  auto stripped = without_inactivity(params);
  CHECK(stripped.alpha[0] == 0.0);
  for (int g = 1; g <= 3; ++g) CHECK(stripped.pi(g, 0) == 0.0);
  auto z = sample_allocations(20, 15, stripped, 9);
  for (int i = 0; i < 20; ++i)
    for (int t = 0; t < 15; ++t) CHECK(z(i, t) != 0);
}

TEST_CASE("parameter files round trip") {
  auto params = benchmark_params();
  std::ostringstream os;
  params.write(os);
  std::istringstream is(os.str());
  auto back = ModelParameters::read(is, "roundtrip");
  CHECK(back.k == params.k);
  CHECK(back.theta == params.theta);
  CHECK(back.p == params.p);
  CHECK(back.q == params.q);
  for (int g = 0; g <= 3; ++g)
    for (int h = 0; h <= 3; ++h) CHECK_CLOSE(back.pi(g, h), params.pi(g, h), 1e-12);
}

TEST_CASE("parameter file errors") {
  std::istringstream missing_k("theta\n0.5\n");
  CHECK_THROWS_AS(ModelParameters::read(missing_k, "bad"), InputError);
  std::istringstream asym("k 2\ntheta\n0.1 0.2\n0.3 0.4\np\n0.1 0.2\n0.2 0.1\nq\n0.1 0.2\n0.2 0.1\n"
                          "pi\n1 0 0\n0 1 0\n0 0 1\n");
  CHECK_THROWS_AS(ModelParameters::read(asym, "asym"), InputError);
}

TEST_CASE("model parameter invariants are enforced") {
  auto params = benchmark_params();
  params.alpha[1] += 0.5;
  CHECK_THROWS_AS(params.check(), ArgumentError);
}
