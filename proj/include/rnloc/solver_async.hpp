#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rnloc/cost.hpp"
#include "rnloc/rng.hpp"

namespace rnloc {

// Node wake-up distribution: strictly positive probabilities summing to one.
struct ActivationModel {
  Eigen::VectorXd prob;

  static ActivationModel uniform(int n);
  void validate() const;
  int sample(Rng& rng) const;  // inverse-CDF draw
};

enum class EdgeWeight {
  Quarter,    // 1/4 on edge terms in the local objective
  ExactBlock  // 1/2: the weight that makes an activation an exact block
              // minimization of the duplicated network cost
};

struct LocalConfig {
  EdgeWeight edge_weight = EdgeWeight::Quarter;
  // Inner accelerated solver stops once the relative cost decrease falls
  // below inner_tol (0 disables the test) or after max_inner_iters steps.
  double inner_tol = 1e-9;
  int max_inner_iters = 2000;
  double lipschitz_override = 0.0;
};

// Network state between activations. Every node owns its position, a private
// copy of each incident edge auxiliary (oriented away from the node; the copy
// of edge e owned by its smaller endpoint is block 2e, the other 2e+1), and
// its anchor auxiliaries. x holds the last position each node broadcast;
// delivery is reliable and immediate, and a receiving node refreshes its
// mirrored edge copy from the received position.
struct AsyncState {
  Eigen::VectorXd x;  // n*p
  Eigen::VectorXd y;  // 2*num_edges*p directed copies
  Eigen::VectorXd w;  // num_links*p
};

inline int directed_slot(int edge, double sign) { return 2 * edge + (sign > 0.0 ? 0 : 1); }

AsyncState async_init(const Problem& prob, const Eigen::VectorXd& x0);

// Duplicated per-node cost the asynchronous method descends: every directed
// edge copy contributes with weight 1/4, every anchor term with weight 1/2.
// Coincides with the stacked cost whenever the two copies of each edge agree.
double duplicated_cost(const Problem& prob, const AsyncState& state);

// The local objective node i minimizes, reduced over its auxiliaries (they
// always sit at their conditional optimum given x): weighted hinge-Huber
// terms against the neighbors' published positions and the node's anchors.
double local_reduced_cost(const Problem& prob, int node, EdgeWeight mode,
                          const Eigen::Ref<const Eigen::VectorXd>& xi,
                          const Eigen::VectorXd& x_all);

struct LocalBlock {
  Eigen::VectorXd x;       // p
  Eigen::VectorXd y;       // one p-block per incident edge, prob.node_edges[i] order
  Eigen::VectorXd w;       // one p-block per anchor link of the node
  double local_cost = 0.0; // reduced objective at the returned block
  int inner_iterations = 0;
};

// Solves node i's local problem over (x_i, incident y copies, w) with the
// neighbors' published positions frozen: inner accelerated projected-gradient
// loop with step 1/L, warm-started from the node's current block, keeping the
// best iterate by reduced cost, with the auxiliaries finished at their exact
// conditional optimum. Reads nothing beyond node i's own state, its incident
// measurement data and its neighbors' published positions.
LocalBlock local_solve(const Problem& prob, int node, const AsyncState& state,
                       const LocalConfig& cfg);

struct AsyncConfig {
  long num_activations = 10000;
  LocalConfig local;
  int phi_every = 0;  // sample the expected-improvement diagnostic every k activations
  bool record_trajectory = true;
};

struct AsyncResult {
  Eigen::VectorXd x;
  AsyncState state;
  std::vector<double> cost_trace;  // duplicated cost after 0..num_activations activations
  std::vector<int> awakened;       // node index per activation
  std::vector<long> phi_at;        // activation indices where phi was sampled
  std::vector<double> phi_trace;
  long broadcasts = 0;  // one per activation
};

// Randomized single-node method: at each step one node drawn from the
// activation model re-solves its local problem and broadcasts its new
// position. Throws DivergenceError if the monitored cost turns non-finite.
AsyncResult async_solve(const Problem& prob, const Eigen::VectorXd& x0,
                        const ActivationModel& act, const AsyncConfig& cfg, Rng& rng);

// Expected one-activation improvement of the duplicated cost: sum over nodes
// of P_i times the cost drop a hypothetical activation of node i (with
// exact-block weights, broadcast included) would achieve from this state.
// Nonnegative by construction; zero exactly at a block-optimal state.
double expected_improvement(const Problem& prob, const AsyncState& state,
                            const ActivationModel& act, const LocalConfig& cfg);

}  // namespace rnloc
