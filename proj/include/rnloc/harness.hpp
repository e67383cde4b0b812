#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rnloc/cost.hpp"
#include "rnloc/geometry.hpp"
#include "rnloc/noise.hpp"
#include "rnloc/solver_async.hpp"
#include "rnloc/solver_sync.hpp"

namespace rnloc {

enum class SolverKind { Sync, Async };

// 1D star gap-bound experiment settings (scene at unit scale).
struct Bounds1DConfig {
  std::vector<double> anchors{0.0, 1.0};
  double x_true = 0.4;
  double sigma_regular = 0.04;
  double sigma_outlier = 4.0;
  NoiseKind outlier_kind = NoiseKind::Gaussian;
  double huber_radius = 0.08;
  int trials = 500;
};

// Full experiment description. Loadable from a flat JSON file with groups
// network / noise / radii / solver / experiment; every CLI flag overrides the
// matching key.
struct ExperimentConfig {
  GeometryConfig network;
  bool regenerate_per_trial = false;

  NoiseModel regular{NoiseKind::Gaussian, 40.0};
  FaultSpec fault;

  double huber_radius_m = 80.0;
  double l2_sentinel_factor = 1e6;

  SolverKind solver = SolverKind::Sync;
  Loss loss = Loss::Huber;
  SyncConfig sync;
  AsyncConfig async_cfg;
  int compare_sync_iters = 50;

  int trials = 50;
  std::uint64_t seed = 30;
  std::string out_dir = ".";
  bool trial_gap_bounds = false;
  std::vector<double> sigma_grid_m{10.0, 20.0, 40.0};
  std::vector<double> prob_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  Bounds1DConfig bounds;

  // Huber radii for the configured loss: uniform radii for Huber, the
  // quadratic sentinel for the squared baseline.
  HuberRadii radii_for(const NetworkTopology& topo, Loss loss) const;
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Stream layout under one master seed: trial t draws from counter t; network
// generation uses counter 2^32 (+t when regenerated per trial); activation
// schedules use counter 2^33 + t. Documented so runs stay reproducible.
std::uint64_t trial_stream(std::uint64_t master, long t);
std::uint64_t network_stream(std::uint64_t master, long t);
std::uint64_t activation_stream(std::uint64_t master, long t);

// |xhat - xtrue| / n over the stacked coordinate vectors.
double positioning_error(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_true, int n);

struct TrialResult {
  long trial = 0;
  double error_m = 0.0;
  double final_cost = 0.0;   // stacked cost for sync, duplicated cost for async
  long iterations = 0;       // rounds for sync, activations for async
  long broadcasts = 0;
  bool diverged = false;
  double posterior_bound = std::numeric_limits<double>::quiet_NaN();
  double apriori_bound = std::numeric_limits<double>::quiet_NaN();
};

struct McResult {
  std::vector<TrialResult> trials;
  NetworkInstance instance;  // the shared deployment (first trial's when regenerated)
  double mean_error_m = 0.0;
  double ci95_m = 0.0;
  long diverged = 0;
};

// Runs cfg.trials independent trials (measurement draw, uniform random start,
// one solver run each). Trials run in parallel; every trial draws from its
// own counter-derived stream, so results do not depend on scheduling.
McResult run_monte_carlo(const ExperimentConfig& cfg);

struct SweepRow {
  double probability = 0.0;
  std::string solver;  // "huber" or "l2"
  double mean_error_m = 0.0;
  double ci95_m = 0.0;
  int trials = 0;
};
std::vector<SweepRow> sweep_outlier_probability(const ExperimentConfig& cfg,
                                                const std::vector<double>& probabilities);

struct BoundsRow {
  Loss loss = Loss::Huber;
  long trial = 0;
  double true_gap = 0.0;
  double posterior = 0.0;
  double apriori = 0.0;
};
struct BoundsResult {
  std::vector<BoundsRow> rows;
  double mean_true_gap[3] = {0, 0, 0};  // indexed by Loss order
  double mean_posterior[3] = {0, 0, 0};
  double mean_apriori[3] = {0, 0, 0};
};
// Per-trial relaxation-gap certificates on the 1D star, for the quadratic,
// absolute and Huber losses; the true gap comes from the dense 1D oracles.
BoundsResult bounds_experiment_1d(const Bounds1DConfig& cfg, std::uint64_t seed);

struct CompareRow {
  double sigma_m = 0.0;
  std::string solver;  // "sync", "async-exact", "async-quarter"
  double mean_error_m = 0.0;
  double ci95_m = 0.0;
  double mean_broadcasts = 0.0;
  int trials = 0;
};
// Equal-communication comparison: the synchronous solver runs a fixed round
// budget, the asynchronous one gets n * rounds activations, per noise level.
std::vector<CompareRow> sync_vs_async_comm_matched(const ExperimentConfig& cfg,
                                                   const std::vector<double>& sigma_grid_m);

// CSV writers (fixed column order, %.17g floats so values round-trip).
void write_trials_csv(const std::string& path, const std::vector<TrialResult>& rows);
void write_cdf_csv(const std::string& path, std::vector<double> errors);
void write_sync_trajectory_csv(const std::string& path, const SyncResult& res, int n);
void write_async_trajectory_csv(const std::string& path, const AsyncResult& res);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
void write_bounds_csv(const std::string& path, const BoundsResult& res);
void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows);

}  // namespace rnloc
