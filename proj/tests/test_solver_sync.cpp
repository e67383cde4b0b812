#include <cmath>
#include <map>
#include <vector>

#include <doctest.h>

#include "rnloc/cost.hpp"
#include "rnloc/errors.hpp"
#include "rnloc/geometry.hpp"
#include "rnloc/noise.hpp"
#include "rnloc/rng.hpp"
#include "rnloc/solver_sync.hpp"

using namespace rnloc;

namespace {

struct Setup {
  NetworkInstance inst;
  Measurements meas;
  Eigen::VectorXd x0;
};

Setup make_setup(std::uint64_t seed) {
  GeometryConfig gc;
  Setup s;
  s.inst = generate_geometric_network(gc, seed);
  Rng rng(seed + 1000);
  s.meas = sample_measurements(s.inst, NoiseModel{NoiseKind::Gaussian, 40.0}, FaultSpec{}, rng);
  s.x0.resize(gc.n * gc.p);
  for (int i = 0; i < s.x0.size(); ++i) s.x0[i] = rng.uniform(0.0, gc.side_m);
  return s;
}

}  // namespace

TEST_CASE("per-node solver tracks the sparse reference iterate by iterate") {
  for (std::uint64_t seed : {3, 7, 21}) {
    Setup s = make_setup(seed);
    Problem prob = make_problem(s.inst, s.meas, HuberRadii::uniform(s.inst.topology, 80.0));

    std::map<int, Eigen::VectorXd> ref_iters;
    SyncConfig rcfg;
    rcfg.max_iters = 500;
    rcfg.stop_tol = 0.0;
    rcfg.record_trajectory = false;
    rcfg.on_iterate = [&](int t, const Eigen::VectorXd& x) { ref_iters[t] = x; };
    reference_solve(prob, s.x0, rcfg);

    double worst = 0.0;
    SyncConfig cfg = rcfg;
    cfg.on_iterate = [&](int t, const Eigen::VectorXd& x) {
      const double rel = (x - ref_iters[t]).norm() / (1.0 + ref_iters[t].norm());
      worst = std::max(worst, rel);
    };
    sync_solve(prob, s.x0, cfg);
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("one iteration only moves the endpoints of a changed edge") {
  Setup s = make_setup(5);
  Problem base = make_problem(s.inst, s.meas, HuberRadii::uniform(s.inst.topology, 80.0));

  Measurements poked = s.meas;
  const int e = 0;
  // shrink the range so its ball constraint is active from the first step;
  // growing it instead can leave the constraint slack and the iterate unchanged
  poked.edge_range_m[e] *= 0.1;
  Problem probed = make_problem(s.inst, poked, HuberRadii::uniform(s.inst.topology, 80.0));

  SyncConfig cfg;
  cfg.max_iters = 1;
  cfg.stop_tol = 0.0;
  cfg.record_trajectory = false;
  SyncResult a = sync_solve(base, s.x0, cfg);
  SyncResult b = sync_solve(probed, s.x0, cfg);

  const auto& [u, v] = s.inst.topology.edges[e];
  const int p = s.inst.topology.p;
  for (int i = 0; i < s.inst.topology.n; ++i) {
    const bool touched = i == u || i == v;
    const bool moved = (a.x.segment(i * p, p) - b.x.segment(i * p, p)).norm() > 0.0;
    CHECK(moved == touched);
  }
}

TEST_CASE("solver reports convergence against the stop tolerance") {
  Setup s = make_setup(9);
  Problem prob = make_problem(s.inst, s.meas, HuberRadii::uniform(s.inst.topology, 80.0));
  SyncConfig cfg;
  cfg.max_iters = 200000;
  cfg.stop_tol = 1e-10;
  cfg.record_trajectory = false;
  SyncResult res = sync_solve(prob, s.x0, cfg);
  CHECK(res.status == SolveStatus::Converged);
  CHECK(res.iterations < 200000);
  CHECK(res.step_trace.back() < 1e-10);
  CHECK(res.broadcasts == (long)res.iterations * s.inst.topology.n);
}

TEST_CASE("deep runs of both solvers land on the same optimum") {
  Setup s = make_setup(13);
  Problem prob = make_problem(s.inst, s.meas, HuberRadii::uniform(s.inst.topology, 80.0));
  SyncConfig cfg;
  cfg.max_iters = 30000;
  cfg.stop_tol = 0.0;
  cfg.record_trajectory = false;
  const double fa = stacked_cost_F(prob, sync_solve(prob, s.x0, cfg).z);
  const double fb = stacked_cost_F(prob, reference_solve(prob, s.x0, cfg).z);
  CHECK(fa == doctest::Approx(fb).epsilon(1e-10));
}

TEST_CASE("trajectory bookkeeping has the right shape") {
  Setup s = make_setup(17);
  Problem prob = make_problem(s.inst, s.meas, HuberRadii::uniform(s.inst.topology, 80.0));
  SyncConfig cfg;
  cfg.max_iters = 50;
  cfg.stop_tol = 0.0;
  int calls = 0;
  cfg.on_iterate = [&](int t, const Eigen::VectorXd&) {
    ++calls;
    CHECK(t == calls);
  };
  SyncResult res = sync_solve(prob, s.x0, cfg);
  CHECK(res.iterations == 50);
  CHECK(calls == 50);
  CHECK(res.cost_trace.size() == 51);  // cost at 0..50
  CHECK(res.step_trace.size() == 50);
  CHECK(res.z.is_feasible(prob));
  for (double c : res.cost_trace) CHECK(std::isfinite(c));
}

TEST_CASE("final stacked cost brackets the convex cost of the final positions") {
  // f_R is the minimum of F over y and w at fixed x, so it lower-bounds the
  // stacked cost of the returned iterate; near convergence the two touch
  Setup s = make_setup(19);
  Problem prob = make_problem(s.inst, s.meas, HuberRadii::uniform(s.inst.topology, 80.0));
  SyncConfig cfg;
  cfg.max_iters = 3000;
  cfg.stop_tol = 0.0;
  cfg.record_trajectory = false;
  SyncResult res = sync_solve(prob, s.x0, cfg);
  const double F = stacked_cost_F(prob, res.z);
  const double f = convex_cost_fR(prob, res.x);
  CHECK(F >= f - 1e-9);
  CHECK(F <= f + 1e-3 * (1.0 + std::abs(f)));
}

TEST_CASE("non-finite input is reported as divergence") {
  Setup s = make_setup(23);
  Problem prob = make_problem(s.inst, s.meas, HuberRadii::uniform(s.inst.topology, 80.0));
  Eigen::VectorXd bad = s.x0;
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  SyncConfig cfg;
  cfg.max_iters = 10;
  CHECK_THROWS_AS(sync_solve(prob, bad, cfg), DivergenceError);
}
