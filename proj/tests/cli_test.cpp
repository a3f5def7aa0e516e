#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sbtm/adjacency_cube.hpp"
#include "sbtm/allocation.hpp"

namespace fs = std::filesystem;

namespace {

const char* kCli = SBTM_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  fs::path out_file = dir / "stdout.txt";
  std::string cmd = std::string(kCli) + " " + args + " > " + out_file.string() + " 2> " +
                    (dir / "stderr.txt").string();
  int rc = std::system(cmd.c_str());
  std::ifstream is(out_file);
  std::stringstream ss;
  ss << is.rdbuf();
  int code = rc == -1 ? -1 : WEXITSTATUS(rc);
  return {code, ss.str()};
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "sbtm_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double parse_value(const std::string& out, const std::string& key) {
  auto pos = out.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("simulate writes the documented files and is reproducible") {
  auto dir = fresh_dir("simulate");
  auto r1 = run("simulate --n 20 --t 8 --k 3 --jeffreys --seed 1 --out " + (dir / "a").string(), dir);
  CHECK(r1.exit_code == 0);
  for (const char* f : {"cube.txt", "activity.txt", "z_true.csv", "params.txt", "manifest.txt"}) {
    CHECK(fs::exists(dir / "a" / f));
  }
  auto cube = sbtm::read_cube_file((dir / "a" / "cube.txt").string(),
                                   (dir / "a" / "activity.txt").string());
  CHECK(sbtm::validate(cube).ok());

  auto r2 = run("simulate --n 20 --t 8 --k 3 --jeffreys --seed 1 --out " + (dir / "b").string(), dir);
  CHECK(r2.exit_code == 0);
  CHECK(slurp(dir / "a" / "cube.txt") == slurp(dir / "b" / "cube.txt"));
  CHECK(slurp(dir / "a" / "z_true.csv") == slurp(dir / "b" / "z_true.csv"));
}

TEST_CASE("simulate with fixed parameters and --no-inactive") {
  auto dir = fresh_dir("simulate_params");
  std::ofstream params(dir / "params.txt");
  params << "k 2\ntheta\n0.8 0.1\n0.1 0.8\np\n0.7 0.2\n0.2 0.7\nq\n0.3 0.3\n0.3 0.3\n"
         << "pi\n1 0 0\n0 0.9 0.1\n0 0.1 0.9\nalpha\n0 0.5 0.5\n";
  params.close();
  auto r = run("simulate --n 15 --t 6 --params " + (dir / "params.txt").string() +
                   " --no-inactive --seed 3 --out " + (dir / "sim").string(),
               dir);
  CHECK(r.exit_code == 0);
  auto z = sbtm::read_allocation_csv((dir / "sim" / "z_true.csv").string());
  for (int i = 0; i < z.n_nodes(); ++i)
    for (int t = 0; t < z.n_frames(); ++t) CHECK(z(i, t) != 0);
}

TEST_CASE("missing required options exit with code 2") {
  auto dir = fresh_dir("usage");
  CHECK(run("simulate --t 8 --k 3", dir).exit_code == 2);
  CHECK(run("fit", dir).exit_code == 2);
  CHECK(run("definitely-not-a-subcommand", dir).exit_code == 2);
}

TEST_CASE("fit runs end to end, prints the summary line and is byte-stable") {
  auto dir = fresh_dir("fit");
  REQUIRE(run("simulate --n 20 --t 8 --k 2 --seed 5 --out " + (dir / "sim").string(), dir)
              .exit_code == 0);
  std::string fit_args = "fit --cube " + (dir / "sim" / "cube.txt").string() + " --activity " +
                         (dir / "sim" / "activity.txt").string() +
                         " --kup 4 --restarts 3 --seed 11 --out ";
  auto r1 = run(fit_args + (dir / "f1").string(), dir);
  CHECK(r1.exit_code == 0);
  for (const char* f : {"z_hat.csv", "theta_hat.csv", "p_hat.csv", "q_hat.csv", "pi_hat.csv",
                        "trajectories.csv", "manifest.txt"}) {
    CHECK(fs::exists(dir / "f1" / f));
  }
  double log_icl = parse_value(r1.out, "log_icl");
  CHECK(std::isfinite(log_icl));
  double k = parse_value(r1.out, "k");
  CHECK(k >= 1);
  CHECK(parse_value(r1.out, "sweeps") >= 1);
  CHECK(parse_value(r1.out, "seconds") >= 0.0);

  auto r2 = run(fit_args + (dir / "f2").string(), dir);
  CHECK(r2.exit_code == 0);
  // identical seed, identical outputs (manifest differs by wall time)
  for (const char* f : {"z_hat.csv", "theta_hat.csv", "p_hat.csv", "q_hat.csv", "pi_hat.csv",
                        "trajectories.csv"}) {
    CHECK(slurp(dir / "f1" / f) == slurp(dir / "f2" / f));
  }

  // the reported objective matches the icl subcommand on the fitted labels
  auto icl_out = run("icl --cube " + (dir / "sim" / "cube.txt").string() + " --activity " +
                         (dir / "sim" / "activity.txt").string() + " --z " +
                         (dir / "f1" / "z_hat.csv").string(),
                     dir);
  CHECK(icl_out.exit_code == 0);
  CHECK(parse_value(icl_out.out, "log_icl") == doctest::Approx(log_icl).epsilon(1e-8));
}

TEST_CASE("fit with --kup 1 returns the single-group result") {
  auto dir = fresh_dir("fit_k1");
  REQUIRE(run("simulate --n 10 --t 5 --k 2 --seed 2 --out " + (dir / "sim").string(), dir)
              .exit_code == 0);
  auto r = run("fit --cube " + (dir / "sim" / "cube.txt").string() + " --activity " +
                   (dir / "sim" / "activity.txt").string() + " --kup 1 --seed 1 --out " +
                   (dir / "fit").string(),
               dir);
  CHECK(r.exit_code == 0);
  CHECK(parse_value(r.out, "k") == doctest::Approx(1.0));
}

TEST_CASE("fit ingests edge lists and writes the id map") {
  auto dir = fresh_dir("fit_edges");
  std::ofstream edges(dir / "edges.txt");
  edges << "# three nodes\n0.5 alpha beta\n1.5 beta gamma\n2.5 alpha gamma\n";
  edges.close();
  auto r = run("fit --edges " + (dir / "edges.txt").string() +
                   " --frame-width 1 --kup 2 --seed 1 --out " + (dir / "fit").string(),
               dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "fit" / "id_map.txt"));
  auto ids = slurp(dir / "fit" / "id_map.txt");
  CHECK(ids.find("0 alpha") != std::string::npos);
  CHECK(ids.find("1 beta") != std::string::npos);
  CHECK(ids.find("2 gamma") != std::string::npos);
}

TEST_CASE("malformed input files name the offending line and exit 1") {
  auto dir = fresh_dir("malformed");
  std::ofstream edges(dir / "edges.txt");
  edges << "0.5 a b\nnot-a-timestamp c d\n";
  edges.close();
  auto r = run("fit --edges " + (dir / "edges.txt").string() + " --frame-width 1 --out " +
                   (dir / "fit").string(),
               dir);
  CHECK(r.exit_code == 1);
  auto err = slurp(dir / "stderr.txt");
  CHECK(err.find(":2") != std::string::npos);

  std::ofstream cube(dir / "cube.txt");
  cube << "3 2\n0 0 zzz\n";
  cube.close();
  auto r2 = run("fit --cube " + (dir / "cube.txt").string() + " --out " + (dir / "f2").string(),
                dir);
  CHECK(r2.exit_code == 1);
}

TEST_CASE("evaluate scores a fit against the truth") {
  auto dir = fresh_dir("evaluate");
  REQUIRE(run("simulate --n 15 --t 6 --k 2 --seed 9 --out " + (dir / "sim").string(), dir)
              .exit_code == 0);
  // self-evaluation: everything defined scores 1
  auto r = run("evaluate --z-hat " + (dir / "sim" / "z_true.csv").string() + " --z-true " +
                   (dir / "sim" / "z_true.csv").string() + " --out " + (dir / "eval").string(),
               dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "eval" / "nmi_per_frame.csv"));
  CHECK(fs::exists(dir / "eval" / "k_per_frame.csv"));
  std::ifstream nmi_csv(dir / "eval" / "nmi_per_frame.csv");
  std::string line;
  std::getline(nmi_csv, line);
  CHECK(line == "frame,nmi");
  while (std::getline(nmi_csv, line)) {
    auto comma = line.find(',');
    std::string value = line.substr(comma + 1);
    CHECK((value == "1" || value == "0" || value == "NA"));
  }
}

TEST_CASE("evaluate exits 1 on mismatched shapes") {
  auto dir = fresh_dir("evaluate_mismatch");
  std::ofstream a(dir / "a.csv");
  a << "1,1\n1,2\n";
  a.close();
  std::ofstream b(dir / "b.csv");
  b << "1\n2\n";
  b.close();
  auto r = run("evaluate --z-hat " + (dir / "a.csv").string() + " --z-true " +
                   (dir / "b.csv").string() + " --out " + (dir / "eval").string(),
               dir);
  CHECK(r.exit_code == 1);
}

TEST_CASE("icl prints the hand-computed value for the single-node fixture") {
  auto dir = fresh_dir("icl_fixture");
  std::ofstream cube(dir / "cube.txt");
  cube << "1 2\n";
  cube.close();
  std::ofstream act(dir / "activity.txt");
  act << "0 0\n1 0\n";
  act.close();
  std::ofstream z(dir / "z.csv");
  z << "1,1\n";
  z.close();
  auto r = run("icl --cube " + (dir / "cube.txt").string() + " --activity " +
                   (dir / "activity.txt").string() + " --z " + (dir / "z.csv").string(),
               dir);
  CHECK(r.exit_code == 0);
  CHECK(parse_value(r.out, "log_icl") == doctest::Approx(-0.693147).epsilon(1e-6));
}

TEST_CASE("icl on an empty-activity cube stays finite") {
  auto dir = fresh_dir("icl_empty");
  std::ofstream cube(dir / "cube.txt");
  cube << "3 2\n";
  cube.close();
  std::ofstream z(dir / "z.csv");
  z << "0,0\n0,0\n0,0\n";
  z.close();
  auto r = run("icl --cube " + (dir / "cube.txt").string() + " --z " + (dir / "z.csv").string(),
               dir);
  CHECK(r.exit_code == 0);
  CHECK(std::isfinite(parse_value(r.out, "log_icl")));
}

TEST_CASE("icl exits 1 when the allocation conflicts with the activity") {
  auto dir = fresh_dir("icl_conflict");
  std::ofstream cube(dir / "cube.txt");
  cube << "2 1\n0 0 1\n";
  cube.close();
  std::ofstream z(dir / "z.csv");
  z << "1\n0\n";  // node 1 is active (it has an edge) but labelled 0
  z.close();
  auto r = run("icl --cube " + (dir / "cube.txt").string() + " --z " + (dir / "z.csv").string(),
               dir);
  CHECK(r.exit_code == 1);
}
