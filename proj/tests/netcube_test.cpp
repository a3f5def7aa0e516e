#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sbtm/adjacency_cube.hpp"
#include "sbtm/errors.hpp"
#include "support/oracles.hpp"

using namespace sbtm;

namespace {

EventList make_events(int n_nodes, std::vector<Event> events) {
  return EventList{n_nodes, std::move(events)};
}

}  // namespace

TEST_CASE("discretize buckets events into left-open frames") {
  // events at 0.5 and 0.7 share frame 1; the event at 1.5 opens frame 2
  auto cube = discretize(make_events(4, {{0.5, 1, 2}, {0.7, 2, 1}, {1.5, 1, 3}}), 1.0);
  CHECK(cube.n_frames() == 2);
  CHECK(cube.x(1, 2, 0));
  CHECK(cube.x(2, 1, 0));
  CHECK_FALSE(cube.x(1, 3, 0));
  CHECK(cube.x(1, 3, 1));
  CHECK_FALSE(cube.x(1, 2, 1));
  CHECK(cube.n_edges() == 2);
}

TEST_CASE("discretize leaves empty frames empty") {
  auto cube = discretize(make_events(3, {{0.2, 0, 1}, {4.8, 1, 2}}), 1.0);
  CHECK(cube.n_frames() == 5);
  CHECK(cube.frame_edges(1).empty());
  CHECK(cube.frame_edges(2).empty());
  CHECK(cube.frame_edges(3).empty());
  CHECK(cube.x(0, 1, 0));
  CHECK(cube.x(1, 2, 4));
}

TEST_CASE("discretize honours an explicit time origin") {
  auto cube = discretize(make_events(2, {{3.0, 0, 1}}), 1.0, 0.0);
  CHECK(cube.n_frames() == 3);
  CHECK(cube.x(0, 1, 2));
  CHECK_THROWS_AS(discretize(make_events(2, {{-1.0, 0, 1}}), 1.0, 0.0), InputError);
}

TEST_CASE("discretize rejects bad input") {
  CHECK_THROWS_AS(discretize(make_events(3, {}), 1.0), InputError);
  CHECK_THROWS_AS(discretize(make_events(3, {{0.5, 0, 1}}), 0.0), ArgumentError);
  CHECK_THROWS_AS(discretize(make_events(3, {{0.5, 0, 1}}), -2.0), ArgumentError);
  CHECK_THROWS_AS(discretize(make_events(2, {{0.5, 0, 5}}), 1.0), InputError);  // unknown id
  CHECK_THROWS_AS(discretize(make_events(2, {{0.5, -1, 1}}), 1.0), InputError);
  CHECK_THROWS_AS(discretize(make_events(2, {{0.5, 1, 1}}), 1.0), InputError);  // self-loop
}

TEST_CASE("derive_activity applies the degree rule") {
  // N=3, T=2, single edge (0,1) at frame 0
  AdjacencyCube cube(3, 2, {{0, 0, 1}});
  auto act = derive_activity(cube);
  CHECK(act.active(0, 0));
  CHECK(act.active(1, 0));
  CHECK_FALSE(act.active(2, 0));
  CHECK_FALSE(act.active(0, 1));
  CHECK_FALSE(act.active(1, 1));
  CHECK_FALSE(act.active(2, 1));
}

TEST_CASE("derive_activity is permutation-equivariant") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    auto cube = testing::random_cube(rng, 6, 4, 0.7, 0.4);
    std::vector<int> perm(6);
    for (int i = 0; i < 6; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<FrameEdge> edges;
    for (int t = 0; t < cube.n_frames(); ++t) {
      for (auto [i, j] : cube.frame_edges(t)) edges.push_back({t, perm[i], perm[j]});
    }
    AdjacencyCube permuted(6, 4, std::move(edges));
    auto act_p = derive_activity(permuted);
    for (int t = 0; t < 4; ++t) {
      for (int i = 0; i < 6; ++i) {
        // degree rule commutes with relabelling
        bool has_edge = !cube.neighbors(i, t).empty();
        CHECK(act_p.active(perm[i], t) == has_edge);
      }
    }
  }
}

TEST_CASE("re-discretising serialised edge frames reproduces the cube") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Event> events;
    int n_events = 5 + static_cast<int>(rng.next_below(40));
    for (int e = 0; e < n_events; ++e) {
      int i = static_cast<int>(rng.next_below(6));
      int j = (i + 1 + static_cast<int>(rng.next_below(5))) % 6;
      if (i == j) j = (j + 1) % 6;
      events.push_back({rng.next_double() * 13.0, i, j});
    }
    double width = 0.5 + rng.next_double();
    auto cube = discretize(make_events(6, events), width);
    auto cube2 = discretize(cube_to_events(cube, width), width);
    CHECK(cube == cube2);
  }
}

TEST_CASE("validate flags constructed dense violations") {
  DenseCube d(3, 1);
  SUBCASE("clean symmetric cube") {
    d.x_at(1, 2, 0) = d.x_at(2, 1, 0) = 1;
    d.y_at(1, 2, 0) = d.y_at(2, 1, 0) = 1;
    CHECK(validate(d).ok());
  }
  SUBCASE("x exceeds y") {
    d.x_at(1, 2, 0) = d.x_at(2, 1, 0) = 1;
    auto report = validate(d);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == Violation::Kind::x_exceeds_y);
    CHECK(report.violations[0].i == 1);
    CHECK(report.violations[0].j == 2);
    CHECK(report.violations[0].t == 0);
  }
  SUBCASE("asymmetry") {
    d.x_at(1, 2, 0) = 1;
    d.y_at(1, 2, 0) = d.y_at(2, 1, 0) = 1;
    auto report = validate(d);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].kind == Violation::Kind::asymmetry);
  }
  SUBCASE("nonzero diagonal") {
    d.x_at(1, 1, 0) = 1;
    d.y_at(1, 1, 0) = 1;
    auto report = validate(d);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].kind == Violation::Kind::nonzero_diagonal);
  }
  SUBCASE("y not factorisable") {
    d.y_at(0, 1, 0) = d.y_at(1, 0, 0) = 1;
    d.y_at(0, 2, 0) = d.y_at(2, 0, 0) = 1;
    auto report = validate(d);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations[0].kind == Violation::Kind::y_not_factorisable);
    CHECK(report.violations[0].i == 1);
    CHECK(report.violations[0].j == 2);
  }
}

TEST_CASE("validate on sparse cubes catches explicit-activity conflicts") {
  AdjacencyCube clean(3, 2, {{0, 0, 1}});
  CHECK(validate(clean).ok());
  CHECK(validate(to_dense(clean)).ok());

  NodeActivity act(3, 2);
  act.set(0, 0, true);
  // node 1 not active although the edge (0,1) exists
  CHECK_THROWS_AS(AdjacencyCube(3, 2, {{0, 0, 1}}, act), InputError);
}

TEST_CASE("explicit activity keeps isolated-but-present nodes") {
  NodeActivity act(3, 1);
  act.set(0, 0, true);
  act.set(1, 0, true);
  act.set(2, 0, true);
  AdjacencyCube cube(3, 1, {{0, 0, 1}}, act);
  CHECK(cube.active(2, 0));
  CHECK(cube.y(0, 2, 0));
  CHECK_FALSE(cube.x(0, 2, 0));
  CHECK(cube.n_observed_dyads() == 3);
}

TEST_CASE("cube file round trip") {
  Rng rng(3);
  auto cube = testing::random_cube(rng, 7, 5, 0.8, 0.3);
  auto dir = std::filesystem::temp_directory_path() / "sbtm_netcube_test";
  std::filesystem::create_directories(dir);
  auto cube_path = (dir / "cube.txt").string();
  auto act_path = (dir / "activity.txt").string();
  write_cube_file(cube_path, cube);
  write_activity_file(act_path, cube.activity());
  auto back = read_cube_file(cube_path, act_path);
  CHECK(back == cube);

  // without the activity file the degree rule applies instead
  auto degree_only = read_cube_file(cube_path);
  CHECK(degree_only.n_edges() == cube.n_edges());
}

TEST_CASE("edge list parsing maps ids stably and reports bad lines") {
  std::istringstream good("# comment\n"
                          "10.5 alice bob\n"
                          "11.0,bob,carol\n"
                          "12.25 alice carol\n");
  auto [events, ids] = read_edge_list(good, "good");
  CHECK(events.n_nodes == 3);
  CHECK(ids.index_to_id == std::vector<std::string>{"alice", "bob", "carol"});
  CHECK(events.events.size() == 3);

  std::istringstream numeric("5 20 3\n6 100 3\n");
  auto [ev2, ids2] = read_edge_list(numeric, "numeric");
  CHECK(ids2.index_to_id == std::vector<std::string>{"3", "20", "100"});

  std::istringstream selfloop("1.0 a a\n");
  CHECK_THROWS_WITH_AS(read_edge_list(selfloop, "bad"), doctest::Contains("bad:1"), InputError);

  std::istringstream short_line("1.0 a\n");
  CHECK_THROWS_AS(read_edge_list(short_line, "bad2"), InputError);
}

TEST_CASE("observed dyad count matches the activity pattern") {
  Rng rng(11);
  auto cube = testing::random_cube(rng, 8, 6, 0.6, 0.3);
  long long expect = 0;
  for (int t = 0; t < cube.n_frames(); ++t) {
    long long a = static_cast<long long>(cube.active_nodes(t).size());
    expect += a * (a - 1) / 2;
  }
  CHECK(cube.n_observed_dyads() == expect);
}
