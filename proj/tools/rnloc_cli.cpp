// Command line front end for the rnloc library.
//
// Subcommands:
//   gen         generate a network instance and write instance.json
//   solve-sync  run the synchronous solver on one sampled scenario
//   solve-async run the asynchronous solver on one sampled scenario
//   mc          Monte Carlo batch, writes trials.csv and cdf.csv
//   sweep       outlier-probability sweep, huber vs quadratic
//   bounds1d    single-node optimality-gap bound experiment
//   compare     communication-matched sync vs async error curves
//
// Every subcommand accepts --config (JSON, same schema as load_config),
// --seed and --out; flags override the config file when given.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "rnloc/errors.hpp"
#include "rnloc/harness.hpp"

namespace {

using namespace rnloc;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* sub, CommonOpts* opts) {
  sub->add_option("-c,--config", opts->config_path, "JSON config file");
  sub->add_option("-o,--out", opts->out_dir, "output directory");
  sub->add_option("--seed", opts->seed, "master seed")
      ->each([opts](const std::string&) { opts->seed_set = true; });
}

ExperimentConfig make_config(const CommonOpts& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  if (opts.seed_set) cfg.seed = opts.seed;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

EdgeWeight edge_weight_from_string(const std::string& name) {
  if (name == "quarter") return EdgeWeight::Quarter;
  if (name == "exact" || name == "exact-block") return EdgeWeight::ExactBlock;
  throw ConfigError("unknown edge weight: " + name);
}

// Reproduces trial 0 of the Monte Carlo stream layout so a solve-* run can be
// compared line for line with the first row of an mc run on the same config.
struct Scenario {
  NetworkInstance instance;
  Measurements meas;
  Eigen::VectorXd x0;
};

Scenario sample_scenario(const ExperimentConfig& cfg) {
  Scenario sc;
  sc.instance = generate_geometric_network(cfg.network, network_stream(cfg.seed, 0));
  Rng rng(trial_stream(cfg.seed, 0));
  sc.meas = sample_measurements(sc.instance, cfg.regular, cfg.fault, rng);
  const int n = cfg.network.n, p = cfg.network.p;
  sc.x0.resize(n * p);
  for (int i = 0; i < n * p; ++i) sc.x0[i] = rng.uniform(0.0, cfg.network.side_m);
  return sc;
}

int cmd_gen(const CommonOpts& opts) {
  ExperimentConfig cfg = make_config(opts);
  NetworkInstance inst = generate_geometric_network(cfg.network, network_stream(cfg.seed, 0));
  const std::string path = out_path(cfg, "instance.json");
  save_instance(inst, path);
  const auto& topo = inst.topology;
  const double degree =
      2.0 * (double)(topo.edges.size() + topo.anchor_links.size()) / (double)(topo.n + topo.m);
  std::printf("wrote %s: n=%d m=%d edges=%zu links=%zu avg degree %.2f\n", path.c_str(), topo.n,
              topo.m, topo.edges.size(), topo.anchor_links.size(), degree);
  return 0;
}

int cmd_solve_sync(const CommonOpts& opts, const ExperimentConfig& cfg) {
  Scenario sc = sample_scenario(cfg);
  Problem prob = make_problem(sc.instance, sc.meas, cfg.radii_for(sc.instance.topology, cfg.loss));
  SyncConfig scfg = cfg.sync;
  scfg.record_trajectory = true;
  SyncResult res = sync_solve(prob, sc.x0, scfg);

  save_instance(sc.instance, out_path(cfg, "instance.json"));
  write_sync_trajectory_csv(out_path(cfg, "trajectory.csv"), res, cfg.network.n);
  const double err = positioning_error(res.x, sc.instance.positions, cfg.network.n);
  std::printf("sync: %d iterations (%s), cost %.6g, error %.3f m/node, %ld broadcasts\n",
              res.iterations, res.status == SolveStatus::Converged ? "converged" : "iteration limit",
              stacked_cost_F(prob, res.z), err, res.broadcasts);
  (void)opts;
  return 0;
}

int cmd_solve_async(const CommonOpts& opts, const ExperimentConfig& cfg) {
  Scenario sc = sample_scenario(cfg);
  Problem prob = make_problem(sc.instance, sc.meas, cfg.radii_for(sc.instance.topology, cfg.loss));
  AsyncConfig acfg = cfg.async_cfg;
  acfg.record_trajectory = true;
  if (acfg.phi_every == 0) acfg.phi_every = 100;
  Rng arng(activation_stream(cfg.seed, 0));
  AsyncResult res = async_solve(prob, sc.x0, ActivationModel::uniform(cfg.network.n), acfg, arng);

  save_instance(sc.instance, out_path(cfg, "instance.json"));
  write_async_trajectory_csv(out_path(cfg, "trajectory.csv"), res);
  const double err = positioning_error(res.x, sc.instance.positions, cfg.network.n);
  std::printf("async: %ld activations, duplicated cost %.6g, error %.3f m/node, %ld broadcasts\n",
              (long)acfg.num_activations, duplicated_cost(prob, res.state), err, res.broadcasts);
  (void)opts;
  return 0;
}

int cmd_mc(const ExperimentConfig& cfg) {
  McResult res = run_monte_carlo(cfg);
  save_instance(res.instance, out_path(cfg, "instance.json"));
  write_trials_csv(out_path(cfg, "trials.csv"), res.trials);
  std::vector<double> errors;
  errors.reserve(res.trials.size());
  for (const TrialResult& t : res.trials) errors.push_back(t.error_m);
  write_cdf_csv(out_path(cfg, "cdf.csv"), errors);
  std::printf("mc: %zu trials, mean error %.3f m/node (95%% ci +/- %.3f), %ld diverged\n",
              res.trials.size(), res.mean_error_m, res.ci95_m, res.diverged);
  return 0;
}

int cmd_sweep(ExperimentConfig cfg) {
  // A probability sweep needs a fault injector; default to one heavy-tailed
  // node when the config leaves it unset.
  if (cfg.fault.outlier_node < 0) {
    cfg.fault.outlier_node = 6;
    cfg.fault.outlier_model = NoiseModel{NoiseKind::Laplace, 4000.0};
  }
  std::vector<SweepRow> rows = sweep_outlier_probability(cfg, cfg.prob_grid);
  write_sweep_csv(out_path(cfg, "sweep.csv"), rows);
  for (const SweepRow& r : rows)
    std::printf("p=%.2f %-6s mean %.3f m/node (+/- %.3f, %d trials)\n", r.probability,
                r.solver.c_str(), r.mean_error_m, r.ci95_m, r.trials);
  return 0;
}

int cmd_bounds1d(const ExperimentConfig& cfg) {
  BoundsResult res = bounds_experiment_1d(cfg.bounds, cfg.seed);
  write_bounds_csv(out_path(cfg, "bounds.csv"), res);
  const char* names[] = {"quadratic", "absolute", "huber"};
  for (int li = 0; li < 3; ++li)
    std::printf("%-10s true gap %.4f  posterior %.4f  apriori %.4f\n", names[li],
                res.mean_true_gap[li], res.mean_posterior[li], res.mean_apriori[li]);
  return 0;
}

int cmd_compare(ExperimentConfig cfg) {
  // The comparison stresses robustness under a persistent heavy outlier;
  // default to one Gaussian-corrupted node when the config leaves it unset.
  if (cfg.fault.outlier_node < 0) {
    cfg.fault.outlier_node = 6;
    cfg.fault.outlier_probability = 1.0;
    cfg.fault.outlier_model = NoiseModel{NoiseKind::Gaussian, 5000.0};
  }
  std::vector<CompareRow> rows = sync_vs_async_comm_matched(cfg, cfg.sigma_grid_m);
  write_compare_csv(out_path(cfg, "compare.csv"), rows);
  for (const CompareRow& r : rows)
    std::printf("sigma=%.0f %-12s mean %.3f m/node (+/- %.3f, %.0f broadcasts)\n", r.sigma_m,
                r.solver.c_str(), r.mean_error_m, r.ci95_m, r.mean_broadcasts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust range-only network localization simulator"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  CLI::App* gen = app.add_subcommand("gen", "generate a network instance");
  add_common(gen, &gen_opts);

  CommonOpts ssync_opts;
  int ssync_iters = 0;
  double ssync_tol = -1.0, ssync_radius = 0.0;
  std::string ssync_loss;
  CLI::App* ssync = app.add_subcommand("solve-sync", "run the synchronous solver once");
  add_common(ssync, &ssync_opts);
  ssync->add_option("--iters", ssync_iters, "iteration cap");
  ssync->add_option("--tol", ssync_tol, "relative step stopping tolerance");
  ssync->add_option("--radius-m", ssync_radius, "huber radius in meters");
  ssync->add_option("--loss", ssync_loss, "loss: huber or l2");

  CommonOpts sasync_opts;
  int sasync_acts = 0;
  double sasync_tol = -1.0, sasync_radius = 0.0;
  std::string sasync_weight;
  CLI::App* sasync = app.add_subcommand("solve-async", "run the asynchronous solver once");
  add_common(sasync, &sasync_opts);
  sasync->add_option("--activations", sasync_acts, "number of node activations");
  sasync->add_option("--tol", sasync_tol, "local solve tolerance");
  sasync->add_option("--radius-m", sasync_radius, "huber radius in meters");
  sasync->add_option("--edge-weight", sasync_weight, "edge weight: quarter or exact");

  CommonOpts mc_opts;
  int mc_trials = 0;
  double mc_radius = 0.0;
  std::string mc_loss;
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo batch");
  add_common(mc, &mc_opts);
  mc->add_option("--trials", mc_trials, "number of trials");
  mc->add_option("--radius-m", mc_radius, "huber radius in meters");
  mc->add_option("--loss", mc_loss, "loss: huber or l2");

  CommonOpts sweep_opts;
  int sweep_trials = 0;
  double sweep_radius = 0.0;
  CLI::App* sweep = app.add_subcommand("sweep", "outlier-probability sweep");
  add_common(sweep, &sweep_opts);
  sweep->add_option("--trials", sweep_trials, "trials per grid point");
  sweep->add_option("--radius-m", sweep_radius, "huber radius in meters");

  CommonOpts bounds_opts;
  int bounds_trials = 0;
  CLI::App* bounds = app.add_subcommand("bounds1d", "single-node gap bound experiment");
  add_common(bounds, &bounds_opts);
  bounds->add_option("--trials", bounds_trials, "number of trials");

  CommonOpts cmp_opts;
  int cmp_trials = 0, cmp_iters = 0;
  CLI::App* cmp = app.add_subcommand("compare", "communication-matched sync vs async");
  add_common(cmp, &cmp_opts);
  cmp->add_option("--trials", cmp_trials, "trials per noise level");
  cmp->add_option("--iters", cmp_iters, "sync rounds per trial (async gets n times this)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_opts);

    if (ssync->parsed()) {
      ExperimentConfig cfg = make_config(ssync_opts);
      if (ssync_iters > 0) cfg.sync.max_iters = ssync_iters;
      if (ssync_tol >= 0.0) cfg.sync.stop_tol = ssync_tol;
      if (ssync_radius > 0.0) cfg.huber_radius_m = ssync_radius;
      if (!ssync_loss.empty()) cfg.loss = loss_from_string(ssync_loss);
      return cmd_solve_sync(ssync_opts, cfg);
    }

    if (sasync->parsed()) {
      ExperimentConfig cfg = make_config(sasync_opts);
      if (sasync_acts > 0) cfg.async_cfg.num_activations = sasync_acts;
      if (sasync_tol >= 0.0) cfg.async_cfg.local.inner_tol = sasync_tol;
      if (sasync_radius > 0.0) cfg.huber_radius_m = sasync_radius;
      if (!sasync_weight.empty())
        cfg.async_cfg.local.edge_weight = edge_weight_from_string(sasync_weight);
      return cmd_solve_async(sasync_opts, cfg);
    }

    if (mc->parsed()) {
      ExperimentConfig cfg = make_config(mc_opts);
      if (mc_trials > 0) cfg.trials = mc_trials;
      if (mc_radius > 0.0) cfg.huber_radius_m = mc_radius;
      if (!mc_loss.empty()) cfg.loss = loss_from_string(mc_loss);
      return cmd_mc(cfg);
    }

    if (sweep->parsed()) {
      ExperimentConfig cfg = make_config(sweep_opts);
      if (sweep_trials > 0) cfg.trials = sweep_trials;
      if (sweep_radius > 0.0) cfg.huber_radius_m = sweep_radius;
      return cmd_sweep(cfg);
    }

    if (bounds->parsed()) {
      ExperimentConfig cfg = make_config(bounds_opts);
      if (bounds_trials > 0) cfg.bounds.trials = bounds_trials;
      return cmd_bounds1d(cfg);
    }

    if (cmp->parsed()) {
      ExperimentConfig cfg = make_config(cmp_opts);
      if (cmp_trials > 0) cfg.trials = cmp_trials;
      if (cmp_iters > 0) cfg.compare_sync_iters = cmp_iters;
      return cmd_compare(cfg);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "solver diverged: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
