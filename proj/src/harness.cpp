#include "rnloc/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "rnloc/errors.hpp"

namespace rnloc {

namespace {

using nlohmann::json;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  return out;
}

// Mean and half-width of the normal 95% interval, non-finite entries skipped.
std::pair<double, double> mean_ci95(const std::vector<double>& values) {
  double sum = 0.0;
  long cnt = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    sum += v;
    ++cnt;
  }
  if (cnt == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  const double mean = sum / cnt;
  if (cnt < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / (cnt - 1));
  return {mean, 1.96 * sd / std::sqrt(static_cast<double>(cnt))};
}

void require_keys(const json& obj, const std::string& group,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end())
      throw ConfigError("unknown key \"" + item.key() + "\" in config group \"" + group + "\"");
  }
}

}  // namespace

HuberRadii ExperimentConfig::radii_for(const NetworkTopology& topo, Loss l) const {
  switch (l) {
    case Loss::Huber:
      return HuberRadii::uniform(topo, huber_radius_m);
    case Loss::Quadratic:
      return HuberRadii::quadratic_sentinel(topo, network.side_m, l2_sentinel_factor);
    case Loss::AbsoluteValue:
      break;
  }
  throw ConfigError("no network solver is defined for the absolute loss");
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const json root = json::parse(text);
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    require_keys(root, "(root)", {"network", "noise", "radii", "solver", "experiment"});

    if (root.contains("network")) {
      const json& g = root["network"];
      require_keys(g, "network",
                   {"n", "m", "p", "side_m", "comm_radius_m", "max_attempts",
                    "regenerate_per_trial"});
      if (g.contains("n")) cfg.network.n = g["n"].get<int>();
      if (g.contains("m")) cfg.network.m = g["m"].get<int>();
      if (g.contains("p")) cfg.network.p = g["p"].get<int>();
      if (g.contains("side_m")) cfg.network.side_m = g["side_m"].get<double>();
      if (g.contains("comm_radius_m")) cfg.network.comm_radius_m = g["comm_radius_m"].get<double>();
      if (g.contains("max_attempts")) cfg.network.max_attempts = g["max_attempts"].get<int>();
      if (g.contains("regenerate_per_trial"))
        cfg.regenerate_per_trial = g["regenerate_per_trial"].get<bool>();
    }

    if (root.contains("noise")) {
      const json& g = root["noise"];
      require_keys(g, "noise",
                   {"kind", "sigma_m", "outlier_node", "outlier_probability", "outlier_kind",
                    "outlier_scale_m", "miscalibrated_node", "gain", "per_measurement"});
      if (g.contains("kind")) cfg.regular.kind = noise_kind_from_string(g["kind"].get<std::string>());
      if (g.contains("sigma_m")) cfg.regular.scale_m = g["sigma_m"].get<double>();
      if (g.contains("outlier_node")) cfg.fault.outlier_node = g["outlier_node"].get<int>();
      if (g.contains("outlier_probability"))
        cfg.fault.outlier_probability = g["outlier_probability"].get<double>();
      if (g.contains("outlier_kind"))
        cfg.fault.outlier_model.kind = noise_kind_from_string(g["outlier_kind"].get<std::string>());
      if (g.contains("outlier_scale_m"))
        cfg.fault.outlier_model.scale_m = g["outlier_scale_m"].get<double>();
      if (g.contains("miscalibrated_node"))
        cfg.fault.miscalibrated_node = g["miscalibrated_node"].get<int>();
      if (g.contains("gain")) cfg.fault.gain = g["gain"].get<double>();
      if (g.contains("per_measurement")) cfg.fault.per_measurement = g["per_measurement"].get<bool>();
    }

    if (root.contains("radii")) {
      const json& g = root["radii"];
      require_keys(g, "radii", {"huber_radius_m", "l2_sentinel_factor"});
      if (g.contains("huber_radius_m")) cfg.huber_radius_m = g["huber_radius_m"].get<double>();
      if (g.contains("l2_sentinel_factor"))
        cfg.l2_sentinel_factor = g["l2_sentinel_factor"].get<double>();
    }

    if (root.contains("solver")) {
      const json& g = root["solver"];
      require_keys(g, "solver",
                   {"kind", "loss", "iters", "tol", "activations", "inner_tol", "inner_max_iters",
                    "edge_weight", "phi_every", "compare_sync_iters"});
      if (g.contains("kind")) {
        const std::string kind = g["kind"].get<std::string>();
        if (kind == "sync")
          cfg.solver = SolverKind::Sync;
        else if (kind == "async")
          cfg.solver = SolverKind::Async;
        else
          throw ConfigError("unknown solver kind: " + kind);
      }
      if (g.contains("loss")) cfg.loss = loss_from_string(g["loss"].get<std::string>());
      if (g.contains("iters")) cfg.sync.max_iters = g["iters"].get<int>();
      if (g.contains("tol")) cfg.sync.stop_tol = g["tol"].get<double>();
      if (g.contains("activations")) cfg.async_cfg.num_activations = g["activations"].get<long>();
      if (g.contains("inner_tol")) cfg.async_cfg.local.inner_tol = g["inner_tol"].get<double>();
      if (g.contains("inner_max_iters"))
        cfg.async_cfg.local.max_inner_iters = g["inner_max_iters"].get<int>();
      if (g.contains("edge_weight")) {
        const std::string w = g["edge_weight"].get<std::string>();
        if (w == "quarter")
          cfg.async_cfg.local.edge_weight = EdgeWeight::Quarter;
        else if (w == "exact" || w == "exact-block")
          cfg.async_cfg.local.edge_weight = EdgeWeight::ExactBlock;
        else
          throw ConfigError("unknown edge weight: " + w);
      }
      if (g.contains("phi_every")) cfg.async_cfg.phi_every = g["phi_every"].get<int>();
      if (g.contains("compare_sync_iters"))
        cfg.compare_sync_iters = g["compare_sync_iters"].get<int>();
    }

    if (root.contains("experiment")) {
      const json& g = root["experiment"];
      require_keys(g, "experiment",
                   {"trials", "seed", "out_dir", "gap_bounds", "sigma_grid_m", "prob_grid",
                    "bounds_anchors", "bounds_x_true", "bounds_sigma_regular",
                    "bounds_sigma_outlier", "bounds_outlier_kind", "bounds_huber_radius",
                    "bounds_trials"});
      if (g.contains("trials")) cfg.trials = g["trials"].get<int>();
      if (g.contains("seed")) cfg.seed = g["seed"].get<std::uint64_t>();
      if (g.contains("out_dir")) cfg.out_dir = g["out_dir"].get<std::string>();
      if (g.contains("gap_bounds")) cfg.trial_gap_bounds = g["gap_bounds"].get<bool>();
      if (g.contains("sigma_grid_m")) cfg.sigma_grid_m = g["sigma_grid_m"].get<std::vector<double>>();
      if (g.contains("prob_grid")) cfg.prob_grid = g["prob_grid"].get<std::vector<double>>();
      if (g.contains("bounds_anchors"))
        cfg.bounds.anchors = g["bounds_anchors"].get<std::vector<double>>();
      if (g.contains("bounds_x_true")) cfg.bounds.x_true = g["bounds_x_true"].get<double>();
      if (g.contains("bounds_sigma_regular"))
        cfg.bounds.sigma_regular = g["bounds_sigma_regular"].get<double>();
      if (g.contains("bounds_sigma_outlier"))
        cfg.bounds.sigma_outlier = g["bounds_sigma_outlier"].get<double>();
      if (g.contains("bounds_outlier_kind"))
        cfg.bounds.outlier_kind = noise_kind_from_string(g["bounds_outlier_kind"].get<std::string>());
      if (g.contains("bounds_huber_radius"))
        cfg.bounds.huber_radius = g["bounds_huber_radius"].get<double>();
      if (g.contains("bounds_trials")) cfg.bounds.trials = g["bounds_trials"].get<int>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::uint64_t trial_stream(std::uint64_t master, long t) {
  return derive_stream(master, static_cast<std::uint64_t>(t));
}

std::uint64_t network_stream(std::uint64_t master, long t) {
  return derive_stream(master, (1ULL << 32) + static_cast<std::uint64_t>(t));
}

std::uint64_t activation_stream(std::uint64_t master, long t) {
  return derive_stream(master, (1ULL << 33) + static_cast<std::uint64_t>(t));
}

double positioning_error(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x_true, int n) {
  if (x_hat.size() != x_true.size()) throw ConfigError("estimate and truth sizes differ");
  if (n <= 0) throw ConfigError("positioning error needs n > 0");
  return (x_hat - x_true).norm() / n;
}

namespace {

// One Monte Carlo trial: draw ranges and a uniform start from the trial's own
// stream, run the configured solver, score against the ground truth.
TrialResult run_trial(const ExperimentConfig& cfg, const NetworkInstance* shared, long t) {
  TrialResult out;
  out.trial = t;

  NetworkInstance regenerated;
  const NetworkInstance* inst = shared;
  if (inst == nullptr) {
    regenerated = generate_geometric_network(cfg.network, network_stream(cfg.seed, t));
    inst = &regenerated;
  }

  Rng rng(trial_stream(cfg.seed, t));
  const Measurements meas = sample_measurements(*inst, cfg.regular, cfg.fault, rng);

  const int n = inst->topology.n;
  const int p = inst->topology.p;
  Eigen::VectorXd x0(n * p);
  for (int i = 0; i < n * p; ++i) x0[i] = rng.uniform(0.0, cfg.network.side_m);

  const Problem prob = make_problem(*inst, meas, cfg.radii_for(inst->topology, cfg.loss));

  try {
    Eigen::VectorXd x_hat;
    if (cfg.solver == SolverKind::Sync) {
      SyncConfig scfg = cfg.sync;
      scfg.record_trajectory = false;
      scfg.on_iterate = nullptr;
      const SyncResult res = sync_solve(prob, x0, scfg);
      x_hat = res.x;
      out.final_cost = stacked_cost_F(prob, res.z);
      out.iterations = res.iterations;
      out.broadcasts = res.broadcasts;
    } else {
      AsyncConfig acfg = cfg.async_cfg;
      acfg.record_trajectory = false;
      acfg.phi_every = 0;
      const ActivationModel act = ActivationModel::uniform(n);
      Rng act_rng(activation_stream(cfg.seed, t));
      const AsyncResult res = async_solve(prob, x0, act, acfg, act_rng);
      x_hat = res.x;
      out.final_cost = duplicated_cost(prob, res.state);
      out.iterations = acfg.num_activations;
      out.broadcasts = res.broadcasts;
    }
    out.error_m = positioning_error(x_hat, inst->positions, n);
    if (cfg.trial_gap_bounds) {
      out.posterior_bound = posterior_gap_bound(prob, x_hat, cfg.loss);
      out.apriori_bound = apriori_gap_bound(prob, cfg.loss);
    }
  } catch (const DivergenceError&) {
    out.diverged = true;
    out.error_m = std::numeric_limits<double>::quiet_NaN();
    out.final_cost = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace

McResult run_monte_carlo(const ExperimentConfig& cfg) {
  if (cfg.trials <= 0) throw ConfigError("experiment needs a positive trial count");
  cfg.fault.validate(cfg.network.n);

  McResult out;
  const bool fixed_network = !cfg.regenerate_per_trial;
  out.instance = generate_geometric_network(cfg.network, network_stream(cfg.seed, 0));
  out.trials.assign(cfg.trials, TrialResult{});

  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < cfg.trials; ++t) {
    try {
      out.trials[t] = run_trial(cfg, fixed_network ? &out.instance : nullptr, t);
    } catch (...) {
#pragma omp critical(rnloc_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> errors;
  errors.reserve(out.trials.size());
  for (const TrialResult& r : out.trials) {
    if (r.diverged)
      ++out.diverged;
    else
      errors.push_back(r.error_m);
  }
  const auto [mean, ci] = mean_ci95(errors);
  out.mean_error_m = mean;
  out.ci95_m = ci;
  return out;
}

std::vector<SweepRow> sweep_outlier_probability(const ExperimentConfig& cfg,
                                                const std::vector<double>& probabilities) {
  std::vector<SweepRow> rows;
  rows.reserve(2 * probabilities.size());
  for (double pr : probabilities) {
    for (const Loss loss : {Loss::Huber, Loss::Quadratic}) {
      ExperimentConfig c = cfg;
      c.fault.outlier_probability = pr;
      c.loss = loss;
      c.trial_gap_bounds = false;
      const McResult mc = run_monte_carlo(c);
      SweepRow row;
      row.probability = pr;
      row.solver = loss == Loss::Huber ? "huber" : "l2";
      row.mean_error_m = mc.mean_error_m;
      row.ci95_m = mc.ci95_m;
      row.trials = static_cast<int>(mc.trials.size() - mc.diverged);
      rows.push_back(row);
    }
  }
  return rows;
}

BoundsResult bounds_experiment_1d(const Bounds1DConfig& cfg, std::uint64_t seed) {
  const int K = static_cast<int>(cfg.anchors.size());
  if (K < 1) throw ConfigError("bound experiment needs at least one anchor");
  if (cfg.trials <= 0) throw ConfigError("bound experiment needs a positive trial count");
  if (cfg.huber_radius <= 0.0) throw ConfigError("bound experiment needs a positive radius");

  constexpr std::array<Loss, 3> kLosses{Loss::Quadratic, Loss::AbsoluteValue, Loss::Huber};
  BoundsResult out;
  out.rows.assign(3 * static_cast<std::size_t>(cfg.trials), BoundsRow{});

  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < cfg.trials; ++t) {
    try {
      // Draw order: one regular perturbation per anchor, then the corrupted
      // index, then the outlier magnitude.
      Rng rng(trial_stream(seed, t));
      std::vector<double> ranges(K);
      for (int k = 0; k < K; ++k)
        ranges[k] = std::abs(cfg.x_true - cfg.anchors[k]) + cfg.sigma_regular * rng.gaussian();
      const int corrupted = rng.uniform_int(K);
      const NoiseModel outlier{cfg.outlier_kind, cfg.sigma_outlier};
      ranges[corrupted] += outlier.sample(rng);
      for (double& r : ranges) r = std::abs(r);

      const Star1D star{cfg.anchors, ranges, std::vector<double>(K, cfg.huber_radius)};
      for (std::size_t li = 0; li < kLosses.size(); ++li) {
        const Loss loss = kLosses[li];
        const Minimum1D cvx = convex_minimum_1d(star, loss);
        const Minimum1D g = nonconvex_oracle_1d(star, loss);
        BoundsRow row;
        row.loss = loss;
        row.trial = t;
        row.true_gap = g.value - cvx.value;
        row.posterior = posterior_gap_bound_1d(star, loss, cvx.x);
        row.apriori = apriori_gap_bound_1d(star, loss);
        out.rows[static_cast<std::size_t>(t) * 3 + li] = row;
      }
    } catch (...) {
#pragma omp critical(rnloc_bounds_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  double sum_gap[3] = {0, 0, 0}, sum_post[3] = {0, 0, 0}, sum_ap[3] = {0, 0, 0};
  for (const BoundsRow& r : out.rows) {
    const int li = static_cast<int>(r.loss);
    sum_gap[li] += r.true_gap;
    sum_post[li] += r.posterior;
    sum_ap[li] += r.apriori;
  }
  for (int li = 0; li < 3; ++li) {
    out.mean_true_gap[li] = sum_gap[li] / cfg.trials;
    out.mean_posterior[li] = sum_post[li] / cfg.trials;
    out.mean_apriori[li] = sum_ap[li] / cfg.trials;
  }
  return out;
}

std::vector<CompareRow> sync_vs_async_comm_matched(const ExperimentConfig& cfg,
                                                   const std::vector<double>& sigma_grid_m) {
  if (cfg.trials <= 0) throw ConfigError("comparison needs a positive trial count");
  if (cfg.compare_sync_iters <= 0) throw ConfigError("comparison needs a positive round budget");
  cfg.fault.validate(cfg.network.n);

  const NetworkInstance inst = generate_geometric_network(cfg.network, network_stream(cfg.seed, 0));
  const int n = inst.topology.n;
  const int p = inst.topology.p;
  const long budget = static_cast<long>(n) * cfg.compare_sync_iters;

  std::vector<CompareRow> rows;
  for (std::size_t si = 0; si < sigma_grid_m.size(); ++si) {
    // Every noise level gets its own substream family so levels can be added
    // or removed without disturbing each other.
    const std::uint64_t master = derive_stream(cfg.seed, (3ULL << 32) + si);
    NoiseModel regular = cfg.regular;
    regular.scale_m = sigma_grid_m[si];

    std::vector<double> err_sync(cfg.trials), err_exact(cfg.trials), err_quarter(cfg.trials);

    std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (long t = 0; t < cfg.trials; ++t) {
      try {
        Rng rng(trial_stream(master, t));
        const Measurements meas = sample_measurements(inst, regular, cfg.fault, rng);
        Eigen::VectorXd x0(n * p);
        for (int i = 0; i < n * p; ++i) x0[i] = rng.uniform(0.0, cfg.network.side_m);
        const Problem prob = make_problem(inst, meas, cfg.radii_for(inst.topology, cfg.loss));

        const auto score = [&](const Eigen::VectorXd& x_hat) {
          return positioning_error(x_hat, inst.positions, n);
        };

        SyncConfig scfg = cfg.sync;
        scfg.max_iters = cfg.compare_sync_iters;
        scfg.stop_tol = 0.0;
        scfg.record_trajectory = false;
        scfg.on_iterate = nullptr;
        try {
          err_sync[t] = score(sync_solve(prob, x0, scfg).x);
        } catch (const DivergenceError&) {
          err_sync[t] = std::numeric_limits<double>::quiet_NaN();
        }

        const ActivationModel act = ActivationModel::uniform(n);
        AsyncConfig acfg = cfg.async_cfg;
        acfg.num_activations = budget;
        acfg.record_trajectory = false;
        acfg.phi_every = 0;
        for (const EdgeWeight w : {EdgeWeight::ExactBlock, EdgeWeight::Quarter}) {
          acfg.local.edge_weight = w;
          // Same activation stream for both weightings: identical wake-up order.
          Rng act_rng(activation_stream(master, t));
          double& slot = w == EdgeWeight::ExactBlock ? err_exact[t] : err_quarter[t];
          try {
            slot = score(async_solve(prob, x0, act, acfg, act_rng).x);
          } catch (const DivergenceError&) {
            slot = std::numeric_limits<double>::quiet_NaN();
          }
        }
      } catch (...) {
#pragma omp critical(rnloc_compare_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    const struct {
      const char* name;
      const std::vector<double>* errors;
      double broadcasts;
    } kinds[3] = {{"sync", &err_sync, static_cast<double>(budget)},
                  {"async-exact", &err_exact, static_cast<double>(budget)},
                  {"async-quarter", &err_quarter, static_cast<double>(budget)}};
    for (const auto& kind : kinds) {
      const auto [mean, ci] = mean_ci95(*kind.errors);
      CompareRow row;
      row.sigma_m = sigma_grid_m[si];
      row.solver = kind.name;
      row.mean_error_m = mean;
      row.ci95_m = ci;
      row.mean_broadcasts = kind.broadcasts;
      row.trials = static_cast<int>(
          std::count_if(kind.errors->begin(), kind.errors->end(),
                        [](double v) { return std::isfinite(v); }));
      rows.push_back(row);
    }
  }
  return rows;
}

void write_trials_csv(const std::string& path, const std::vector<TrialResult>& rows) {
  std::ofstream out = open_for_write(path);
  out << "trial,error_m,final_cost,iterations,broadcasts,status,posterior_bound,apriori_bound\n";
  for (const TrialResult& r : rows) {
    out << r.trial << ',' << fmt_g(r.error_m) << ',' << fmt_g(r.final_cost) << ','
        << r.iterations << ',' << r.broadcasts << ',' << (r.diverged ? "diverged" : "ok") << ',';
    if (std::isfinite(r.posterior_bound)) out << fmt_g(r.posterior_bound);
    out << ',';
    if (std::isfinite(r.apriori_bound)) out << fmt_g(r.apriori_bound);
    out << '\n';
  }
}

void write_cdf_csv(const std::string& path, std::vector<double> errors) {
  errors.erase(std::remove_if(errors.begin(), errors.end(),
                              [](double v) { return !std::isfinite(v); }),
               errors.end());
  std::sort(errors.begin(), errors.end());
  std::ofstream out = open_for_write(path);
  out << "error_m,cdf\n";
  const double total = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i)
    out << fmt_g(errors[i]) << ',' << fmt_g((i + 1) / total) << '\n';
}

void write_sync_trajectory_csv(const std::string& path, const SyncResult& res, int n) {
  std::ofstream out = open_for_write(path);
  out << "iteration,cost,max_rel_step,broadcasts\n";
  for (std::size_t t = 0; t < res.cost_trace.size(); ++t) {
    out << t << ',' << fmt_g(res.cost_trace[t]) << ',';
    if (t > 0) out << fmt_g(res.step_trace[t - 1]);
    out << ',' << static_cast<long>(n) * static_cast<long>(t) << '\n';
  }
}

void write_async_trajectory_csv(const std::string& path, const AsyncResult& res) {
  std::ofstream out = open_for_write(path);
  out << "activation,cost,awakened,phi\n";
  std::size_t next_phi = 0;
  for (std::size_t k = 0; k < res.cost_trace.size(); ++k) {
    out << k << ',' << fmt_g(res.cost_trace[k]) << ',';
    if (k > 0) out << res.awakened[k - 1];
    out << ',';
    if (next_phi < res.phi_at.size() && res.phi_at[next_phi] == static_cast<long>(k)) {
      out << fmt_g(res.phi_trace[next_phi]);
      ++next_phi;
    }
    out << '\n';
  }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "probability,solver,mean_error_m,ci95_m,trials\n";
  for (const SweepRow& r : rows)
    out << fmt_g(r.probability) << ',' << r.solver << ',' << fmt_g(r.mean_error_m) << ','
        << fmt_g(r.ci95_m) << ',' << r.trials << '\n';
}

void write_bounds_csv(const std::string& path, const BoundsResult& res) {
  std::ofstream out = open_for_write(path);
  out << "loss,trial,true_gap,posterior_bound,apriori_bound\n";
  for (const BoundsRow& r : res.rows)
    out << to_string(r.loss) << ',' << r.trial << ',' << fmt_g(r.true_gap) << ','
        << fmt_g(r.posterior) << ',' << fmt_g(r.apriori) << '\n';
}

void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "sigma_m,solver,mean_error_m,ci95_m,mean_broadcasts,trials\n";
  for (const CompareRow& r : rows)
    out << fmt_g(r.sigma_m) << ',' << r.solver << ',' << fmt_g(r.mean_error_m) << ','
        << fmt_g(r.ci95_m) << ',' << fmt_g(r.mean_broadcasts) << ',' << r.trials << '\n';
}

}  // namespace rnloc
