#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rnloc/cost.hpp"

namespace rnloc {

enum class SolveStatus { Converged, IterationLimit };

struct SyncConfig {
  int max_iters = 5000;
  // Stop when max_i |x_i[t] - x_i[t-1]| / (1 + |x_i[t]|) falls below this;
  // 0 disables the test and runs max_iters rounds.
  double stop_tol = 1e-7;
  // 0: use the problem's precomputed constant.
  double lipschitz_override = 0.0;
  bool record_trajectory = true;
  // Called with (t, x[t]) after every round; used by equivalence tests.
  std::function<void(int, const Eigen::VectorXd&)> on_iterate;
};

struct SyncResult {
  Eigen::VectorXd x;                // final n*p estimate
  StackedPoint z;                   // final stacked iterate (canonical y)
  std::vector<double> cost_trace;   // F at iterations 0..T (when recorded)
  std::vector<double> step_trace;   // max relative x change at 1..T
  long broadcasts = 0;              // n per round
  int iterations = 0;
  SolveStatus status = SolveStatus::IterationLimit;
};

// Accelerated first-order method on the stacked convex cost, run as a
// simulated synchronous message-passing network: every round each node
// broadcasts its extrapolated position, then updates its own position and its
// private copies of the incident edge/link auxiliaries from received values
// only. Node updates within a round are independent and run in parallel.
// Throws DivergenceError if the cost turns non-finite.
SyncResult sync_solve(const Problem& prob, const Eigen::VectorXd& x0, const SyncConfig& cfg = {});

// Same iteration written centrally against explicit stacked matrices built
// from incidence_matrix. Serial; kept as the reference implementation the
// distributed solver is checked against, and as the long-horizon optimum
// oracle.
SyncResult reference_solve(const Problem& prob, const Eigen::VectorXd& x0,
                           const SyncConfig& cfg = {});

}  // namespace rnloc
