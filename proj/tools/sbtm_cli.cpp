// Command-line front end: simulate networks, fit allocations by greedy exact
// ICL maximisation, evaluate fits against a reference, and score a given
// allocation. Every run writes a key-value manifest sufficient to replay it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbtm/errors.hpp"
#include "sbtm/generative.hpp"
#include "sbtm/greedy.hpp"
#include "sbtm/metrics.hpp"
#include "sbtm/rng.hpp"
#include "sbtm/version.hpp"

namespace fs = std::filesystem;
using namespace sbtm;

namespace {

struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
  void add(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    entries.emplace_back(key, buf);
  }
  void add(const std::string& key, long long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, uint64_t value) { add(key, std::to_string(value)); }

  void write(const fs::path& path) const {
    std::ofstream os(path);
    if (!os) throw InputError("cannot open " + path.string() + " for writing");
    for (const auto& [k, v] : entries) os << k << '=' << v << '\n';
  }
};

/// Scalar per-component hyperparameter overrides, `key value` per line.
/// Keys: delta eta0 zeta0 a_p b_p a_q b_q. Everything defaults to 0.5.
Hyperparameters load_hyper(const std::optional<std::string>& path, int k_up, Manifest& manifest) {
  Hyperparameters hyper = Hyperparameters::jeffreys(k_up);
  if (!path) return hyper;
  std::ifstream is(*path);
  if (!is) throw InputError("cannot open hyperparameter file " + *path);
  std::string key;
  double value;
  while (is >> key) {
    if (key[0] == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    if (!(is >> value)) throw InputError(*path + ": missing value for key `" + key + "`");
    if (!(value > 0.0)) throw ArgumentError(*path + ": hyperparameter `" + key + "` must be positive");
    if (key == "delta") {
      hyper.delta.fill(value);
    } else if (key == "eta0") {
      hyper.eta0.fill(value);
    } else if (key == "zeta0") {
      hyper.zeta0.fill(value);
    } else if (key == "a_p") {
      hyper.a_p.fill(value);
    } else if (key == "b_p") {
      hyper.b_p.fill(value);
    } else if (key == "a_q") {
      hyper.a_q.fill(value);
    } else if (key == "b_q") {
      hyper.b_q.fill(value);
    } else {
      throw InputError(*path + ": unknown hyperparameter key `" + key + "`");
    }
    manifest.add("hyper_override." + key, value);
  }
  return hyper;
}

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  int n = 0, t = 0, k = 0;
  uint64_t seed = 1;
  bool jeffreys = false;
  bool no_inactive = false;
  std::optional<std::string> hyper_file, params_file;
  std::string out_dir = ".";
};

int run_simulate(const SimulateArgs& args, Manifest manifest) {
  fs::create_directories(args.out_dir);
  ModelParameters params;
  if (args.params_file) {
    params = ModelParameters::read_file(*args.params_file);
    manifest.add("params_file", *args.params_file);
  } else {
    if (args.k < 1) throw ArgumentError("--k is required when no --params file is given");
    Hyperparameters hyper = load_hyper(args.hyper_file, args.k, manifest);
    params = sample_params(args.k, hyper, derive_seed(args.seed, 1));
  }
  if (args.no_inactive) params = without_inactivity(std::move(params));

  SimOutput sim = simulate(args.n, args.t, params, derive_seed(args.seed, 2));

  fs::path out(args.out_dir);
  write_cube_file((out / "cube.txt").string(), sim.cube);
  write_activity_file((out / "activity.txt").string(), sim.cube.activity());
  write_allocation_csv((out / "z_true.csv").string(), sim.z_true);
  sim.params.write_file((out / "params.txt").string());

  manifest.add("n", args.n);
  manifest.add("t", args.t);
  manifest.add("k", sim.params.k);
  manifest.add("seed", args.seed);
  manifest.add("no_inactive", args.no_inactive ? "true" : "false");
  manifest.add("cube_file", (out / "cube.txt").string());
  manifest.add("n_edges", sim.cube.n_edges());
  manifest.write(out / "manifest.txt");
  std::cout << "n=" << args.n << " t=" << args.t << " k=" << sim.params.k
            << " edges=" << sim.cube.n_edges() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::optional<std::string> cube_file, activity_file, edges_file, hyper_file;
  double frame_width = 0.0;
  std::optional<double> time_origin;
  int k_up = 10;
  int restarts = 1;
  std::string init = "kmeans";
  uint64_t seed = 1;
  int max_sweeps = 100;
  int threads = 0;
  bool resweep = false;
  bool dump_stats = false;
  std::string out_dir = ".";
};

int run_fit(const FitArgs& args, Manifest manifest) {
  fs::create_directories(args.out_dir);
  fs::path out(args.out_dir);

  std::optional<AdjacencyCube> cube;
  if (args.edges_file) {
    if (!(args.frame_width > 0.0))
      throw ArgumentError("--frame-width must be positive with --edges");
    auto [events, id_map] = read_edge_list(*args.edges_file);
    cube = discretize(events, args.frame_width, args.time_origin);
    id_map.write_file((out / "id_map.txt").string());
    manifest.add("edges_file", *args.edges_file);
    manifest.add("frame_width", args.frame_width);
    if (args.time_origin) manifest.add("time_origin", *args.time_origin);
  } else {
    cube = read_cube_file(*args.cube_file, args.activity_file);
    manifest.add("cube_file", *args.cube_file);
    if (args.activity_file) manifest.add("activity_file", *args.activity_file);
  }

  FitConfig config;
  config.k_up = args.k_up;
  config.n_restarts = args.restarts;
  config.seed = args.seed;
  config.max_sweeps = args.max_sweeps;
  config.n_threads = args.threads;
  config.resweep_after_merge = args.resweep;
  if (args.init == "random") {
    config.init = InitMethod::random;
  } else if (args.init == "kmeans") {
    config.init = InitMethod::kmeans_profile;
  } else {
    throw ArgumentError("--init must be `random` or `kmeans`");
  }

  Hyperparameters hyper = load_hyper(args.hyper_file, config.k_up, manifest);
  FitResult result = fit(*cube, hyper, config);

  write_allocation_csv((out / "z_hat.csv").string(), result.z_hat);
  SufficientStats stats = compute_stats(*cube, result.z_hat);
  PluginEstimates est = plugin_estimates(stats);
  write_block_matrix_csv((out / "theta_hat.csv").string(), est.theta_hat);
  write_block_matrix_csv((out / "p_hat.csv").string(), est.p_hat);
  write_block_matrix_csv((out / "q_hat.csv").string(), est.q_hat);
  write_dense_matrix_csv((out / "pi_hat.csv").string(), est.pi_hat);
  write_trajectories_csv((out / "trajectories.csv").string(),
                         group_size_trajectories(result.z_hat));
  if (args.dump_stats) {
    std::ofstream os(out / "stats.txt");
    stats.dump(os);
  }

  manifest.add("n", cube->n_nodes());
  manifest.add("t", cube->n_frames());
  manifest.add("k_up", config.k_up);
  manifest.add("restarts", config.n_restarts);
  manifest.add("init", args.init);
  manifest.add("seed", config.seed);
  manifest.add("max_sweeps", config.max_sweeps);
  manifest.add("threads", config.n_threads);
  manifest.add("resweep_after_merge", config.resweep_after_merge ? "true" : "false");
  if (cube->n_frames() == 1)
    manifest.add("alpha_convention", "uniform over frame-1 states (single frame)");
  manifest.add("log_icl", result.log_icl);
  manifest.add("k_hat", result.k_hat);
  manifest.add("n_sweeps", result.n_sweeps);
  manifest.add("restart_index", result.restart_index);
  manifest.add("wall_time_s", result.wall_time_s);
  manifest.write(out / "manifest.txt");

  std::printf("log_icl=%.10g k=%d sweeps=%d seconds=%.3f\n", result.log_icl, result.k_hat,
              result.n_sweeps, result.wall_time_s);
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string z_hat_file, z_true_file;
  std::string out_dir = ".";
};

int run_evaluate(const EvaluateArgs& args, Manifest manifest) {
  fs::create_directories(args.out_dir);
  fs::path out(args.out_dir);
  AllocationMatrix z_hat = read_allocation_csv(args.z_hat_file);
  AllocationMatrix z_true = read_allocation_csv(args.z_true_file);

  std::vector<double> nmi_values;
  try {
    nmi_values = nmi_per_frame(z_true, z_hat);
  } catch (const ArgumentError& e) {
    throw InputError(e.what());  // mismatched data files are a data error
  }
  write_nmi_table((out / "nmi_per_frame.csv").string(), nmi_values);
  write_k_per_frame_table((out / "k_per_frame.csv").string(), z_true, z_hat);

  double median = std::numeric_limits<double>::quiet_NaN();
  {
    std::vector<double> defined;
    for (double v : nmi_values) {
      if (!std::isnan(v)) defined.push_back(v);
    }
    if (!defined.empty()) {
      std::sort(defined.begin(), defined.end());
      size_t m = defined.size();
      median = m % 2 ? defined[m / 2] : 0.5 * (defined[m / 2 - 1] + defined[m / 2]);
    }
  }

  manifest.add("z_hat_file", args.z_hat_file);
  manifest.add("z_true_file", args.z_true_file);
  manifest.add("nmi_normalisation", "geometric_mean");
  manifest.add("median_nmi", median);
  manifest.write(out / "manifest.txt");
  if (std::isnan(median)) {
    std::printf("median_nmi=NA\n");
  } else {
    std::printf("median_nmi=%.10g\n", median);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct IclArgs {
  std::string cube_file, z_file;
  std::optional<std::string> activity_file, hyper_file;
};

int run_icl(const IclArgs& args) {
  AdjacencyCube cube = read_cube_file(args.cube_file, args.activity_file);
  AllocationMatrix z = read_allocation_csv(args.z_file);
  if (z.n_nodes() != cube.n_nodes() || z.n_frames() != cube.n_frames())
    throw InputError("allocation shape does not match cube");
  Manifest scratch;
  Hyperparameters hyper = load_hyper(args.hyper_file, z.k_up(), scratch);
  SufficientStats stats = compute_stats(cube, z);
  std::printf("log_icl=%.12g\n", log_icl_full(stats, hyper));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic block transition model fitting by exact ICL maximisation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Sample a network from the generative hierarchy");
  sim->add_option("--n", sim_args.n, "Number of nodes")->required();
  sim->add_option("--t", sim_args.t, "Number of frames")->required();
  sim->add_option("--k", sim_args.k, "Number of groups (prior mode)");
  sim->add_option("--seed", sim_args.seed, "Root RNG seed");
  sim->add_flag("--jeffreys", sim_args.jeffreys, "Use Jeffreys hyperparameters (the default)");
  sim->add_flag("--no-inactive", sim_args.no_inactive, "Remove all transition mass into state 0");
  sim->add_option("--hyper", sim_args.hyper_file, "Scalar hyperparameter overrides file");
  sim->add_option("--params", sim_args.params_file, "Fixed model parameter file");
  sim->add_option("--out", sim_args.out_dir, "Output directory");

  FitArgs fit_args;
  auto* fitc = app.add_subcommand("fit", "Fit allocations by greedy exact ICL maximisation");
  auto* cube_opt = fitc->add_option("--cube", fit_args.cube_file, "Cube file (`N T` header + `t i j` lines)");
  fitc->add_option("--activity", fit_args.activity_file, "Explicit activity file (`t i` lines)")
      ->needs(cube_opt);
  auto* edges_opt = fitc->add_option("--edges", fit_args.edges_file,
                                     "Timestamped edge list (`timestamp a b` lines)");
  cube_opt->excludes(edges_opt);
  fitc->add_option("--frame-width", fit_args.frame_width, "Frame width for --edges")->needs(edges_opt);
  fitc->add_option("--time-origin", fit_args.time_origin, "Left edge of frame 1")->needs(edges_opt);
  fitc->add_option("--kup", fit_args.k_up, "Upper bound on the number of groups");
  fitc->add_option("--restarts", fit_args.restarts, "Independent restarts");
  fitc->add_option("--init", fit_args.init, "Initialisation: random or kmeans");
  fitc->add_option("--seed", fit_args.seed, "Root RNG seed");
  fitc->add_option("--max-sweeps", fit_args.max_sweeps, "Safety cap on sweeps per restart");
  fitc->add_option("--threads", fit_args.threads, "Parallel restarts (0 = hardware)");
  fitc->add_flag("--resweep", fit_args.resweep, "Re-run sweeps after the merge phase");
  fitc->add_flag("--dump-stats", fit_args.dump_stats, "Write the sufficient statistics dump");
  fitc->add_option("--hyper", fit_args.hyper_file, "Scalar hyperparameter overrides file");
  fitc->add_option("--out", fit_args.out_dir, "Output directory");

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "Per-frame NMI and group counts of a fit");
  eval->add_option("--z-hat", eval_args.z_hat_file, "Fitted allocation CSV")->required();
  eval->add_option("--z-true", eval_args.z_true_file, "Reference allocation CSV")->required();
  eval->add_option("--out", eval_args.out_dir, "Output directory");

  IclArgs icl_args;
  auto* iclc = app.add_subcommand("icl", "Print the exact log-ICL of an allocation");
  iclc->add_option("--cube", icl_args.cube_file, "Cube file")->required();
  iclc->add_option("--activity", icl_args.activity_file, "Explicit activity file");
  iclc->add_option("--z", icl_args.z_file, "Allocation CSV")->required();
  iclc->add_option("--hyper", icl_args.hyper_file, "Scalar hyperparameter overrides file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Manifest manifest;
    manifest.add("command", join_args(argc, argv));
    manifest.add("version", std::string(kVersion));
    if (sim->parsed()) return run_simulate(sim_args, std::move(manifest));
    if (fitc->parsed()) {
      if (!fit_args.cube_file && !fit_args.edges_file)
        throw ArgumentError("one of --cube or --edges is required");
      return run_fit(fit_args, std::move(manifest));
    }
    if (eval->parsed()) return run_evaluate(eval_args, std::move(manifest));
    if (iclc->parsed()) return run_icl(icl_args);
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
