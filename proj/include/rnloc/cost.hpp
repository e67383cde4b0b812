#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rnloc/geometry.hpp"
#include "rnloc/noise.hpp"

namespace rnloc {

// ---------------------------------------------------------------------------
// scalar losses
// ---------------------------------------------------------------------------

// Huber loss: u^2 inside [-delta, delta], linear growth 2*delta*|u| - delta^2
// outside. Throws std::domain_error for delta <= 0.
double huber(double delta, double u);

enum class Loss { Quadratic, AbsoluteValue, Huber };

std::string to_string(Loss loss);
Loss loss_from_string(const std::string& name);

// u^2, |u|, or huber(delta, u); delta is only read for the Huber loss.
double loss_value(Loss loss, double delta, double u);

// ---------------------------------------------------------------------------
// ball geometry
// ---------------------------------------------------------------------------

// Euclidean projection onto the origin-centered ball of the given radius.
Eigen::VectorXd project_ball(const Eigen::Ref<const Eigen::VectorXd>& v, double radius);
void project_ball_inplace(Eigen::Ref<Eigen::VectorXd> v, double radius);

// Squared distance from v to that ball: 0 inside, (|v| - radius)^2 outside.
double dist_sq_ball(const Eigen::Ref<const Eigen::VectorXd>& v, double radius);

// Smoothed square |v|^2 - dist_sq_ball(v, delta); agrees with huber(delta, |v|).
// Its gradient is 2 * project_ball(v, delta).
double psi(double delta, const Eigen::Ref<const Eigen::VectorXd>& v);

// ---------------------------------------------------------------------------
// localization problem
// ---------------------------------------------------------------------------

// Per-edge and per-link Huber radii (meters).
struct HuberRadii {
  std::vector<double> edge;  // D, aligned with topology.edges
  std::vector<double> link;  // R, aligned with topology.anchor_links

  static HuberRadii uniform(const NetworkTopology& topo, double radius_m);
  // Radii so large that the loss stays quadratic for any point in the scene;
  // turns the robust cost into the plain squared-hinge relaxation.
  static HuberRadii quadratic_sentinel(const NetworkTopology& topo, double scene_m,
                                       double factor = 1e6);
};

struct IncidentEdge {
  int edge;     // index into topology.edges
  int nbr;      // the other endpoint
  double sign;  // +1 when this node is the smaller endpoint of the edge
};
struct IncidentLink {
  int link;  // index into topology.anchor_links
  int anchor;
};

// One localization problem: a deployment, one trial of ranges, and the Huber
// radii, with per-node incidence lists and the gradient Lipschitz constant
// precomputed.
struct Problem {
  NetworkInstance instance;
  Measurements meas;
  HuberRadii radii;
  std::vector<std::vector<IncidentEdge>> node_edges;
  std::vector<std::vector<IncidentLink>> node_links;
  double lipschitz = 0.0;

  int n() const { return instance.topology.n; }
  int p() const { return instance.topology.p; }
  int num_edges() const { return static_cast<int>(instance.topology.edges.size()); }
  int num_links() const { return static_cast<int>(instance.topology.anchor_links.size()); }
  Eigen::VectorXd anchor(int k) const { return instance.anchor(k); }
};

Problem make_problem(const NetworkInstance& inst, const Measurements& meas,
                     const HuberRadii& radii);

// 2 + 2 * max degree + max anchor links; a valid gradient Lipschitz constant
// for the stacked cost, independent of the radii.
double lipschitz_constant(const NetworkTopology& topo);

// Stacked optimization variable z = (x, y, w): positions, one auxiliary
// vector per edge (canonical orientation, smaller endpoint first) and one per
// anchor link. Feasible when |y_e| <= d_e and |w_l| <= r_l.
struct StackedPoint {
  Eigen::VectorXd x;  // n*p
  Eigen::VectorXd y;  // num_edges*p
  Eigen::VectorXd w;  // num_links*p

  static StackedPoint zeros(const Problem& prob);
  // y_e = project(x_a - x_b, d_e), w_l = project(x_i - a_k, r_l): the exact
  // conditional minimizers of the stacked cost for the given positions.
  static StackedPoint from_positions(const Problem& prob, const Eigen::VectorXd& x0);

  Eigen::VectorXd flat() const;                          // [x; y; w]
  static StackedPoint unflat(const Problem& prob, const Eigen::VectorXd& v);
  void clamp_feasible(const Problem& prob);              // project y, w into their balls
  bool is_feasible(const Problem& prob, double rel_tol = 1e-9) const;
};

// Robust nonconvex cost: sum of 0.5 * huber(radius, |difference| - range)
// over edges and anchor links.
double nonconvex_cost_gR(const Problem& prob, const Eigen::VectorXd& x);

// Its convex envelope-style underestimator with the hinge (|difference| -
// range)_+ inside the loss.
double convex_cost_fR(const Problem& prob, const Eigen::VectorXd& x);

// Smooth stacked form whose constrained minimum over feasible z matches the
// minimum of convex_cost_fR. Throws FeasibilityError for infeasible z.
double stacked_cost_F(const Problem& prob, const StackedPoint& z);

// Gradient of stacked_cost_F; writes into grad (resized as needed).
void stacked_gradient(const Problem& prob, const StackedPoint& z, StackedPoint& grad);

// ---------------------------------------------------------------------------
// relaxation gap certificates
// ---------------------------------------------------------------------------

// Computable after solving the convex problem: sum of 0.5 * loss(discrepancy)
// over the terms whose discrepancy |difference| - range is <= 0 at x_cvx.
// Upper-bounds the gap between the nonconvex and convex optimal values.
double posterior_gap_bound(const Problem& prob, const Eigen::VectorXd& x_cvx, Loss loss);

// Computable before solving anything: sum of 0.5 * loss(range) over all terms.
double apriori_gap_bound(const Problem& prob, Loss loss);

// ---------------------------------------------------------------------------
// one-dimensional star problems (bound experiments and oracles)
// ---------------------------------------------------------------------------

// Single unknown scalar position measured against fixed scalar anchors.
struct Star1D {
  std::vector<double> anchors;
  std::vector<double> ranges;
  std::vector<double> radii;  // per-anchor Huber radii
};

// Cost at x; convexified applies the positive-part hinge inside the loss.
double star_cost_1d(const Star1D& star, Loss loss, bool convexified, double x);

struct Minimum1D {
  double value = 0.0;
  double x = 0.0;
};

// Dense-grid global minimization with local ternary refinement, grid doubling
// until the minimum is stable to 1e-7. Works for the nonconvex costs; used as
// the ground-truth route for the gap experiments.
Minimum1D minimize_grid_1d(const std::function<double(double)>& f, double lo, double hi);

Minimum1D nonconvex_oracle_1d(const Star1D& star, Loss loss);
Minimum1D convex_minimum_1d(const Star1D& star, Loss loss);
double posterior_gap_bound_1d(const Star1D& star, Loss loss, double x_cvx);
double apriori_gap_bound_1d(const Star1D& star, Loss loss);

}  // namespace rnloc
