#include "rnloc/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rnloc/errors.hpp"

namespace rnloc {

double huber(double delta, double u) {
  if (delta <= 0.0) throw std::domain_error("huber radius must be positive");
  const double a = std::abs(u);
  if (a <= delta) return u * u;
  return 2.0 * delta * a - delta * delta;
}

std::string to_string(Loss loss) {
  switch (loss) {
    case Loss::Quadratic: return "quadratic";
    case Loss::AbsoluteValue: return "absolute";
    case Loss::Huber: return "huber";
  }
  return "?";
}

Loss loss_from_string(const std::string& name) {
  if (name == "quadratic" || name == "l2") return Loss::Quadratic;
  if (name == "absolute" || name == "l1") return Loss::AbsoluteValue;
  if (name == "huber") return Loss::Huber;
  throw ConfigError("unknown loss: " + name);
}

double loss_value(Loss loss, double delta, double u) {
  switch (loss) {
    case Loss::Quadratic: return u * u;
    case Loss::AbsoluteValue: return std::abs(u);
    case Loss::Huber: return huber(delta, u);
  }
  return 0.0;
}

Eigen::VectorXd project_ball(const Eigen::Ref<const Eigen::VectorXd>& v, double radius) {
  Eigen::VectorXd out = v;
  project_ball_inplace(out, radius);
  return out;
}

void project_ball_inplace(Eigen::Ref<Eigen::VectorXd> v, double radius) {
  if (radius < 0.0) throw std::domain_error("ball radius must be nonnegative");
  const double nv = v.norm();
  if (nv > radius) v *= radius / nv;
}

double dist_sq_ball(const Eigen::Ref<const Eigen::VectorXd>& v, double radius) {
  if (radius < 0.0) throw std::domain_error("ball radius must be nonnegative");
  const double nv = v.norm();
  if (nv <= radius) return 0.0;
  const double excess = nv - radius;
  return excess * excess;
}

double psi(double delta, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (delta <= 0.0) throw std::domain_error("huber radius must be positive");
  return v.squaredNorm() - dist_sq_ball(v, delta);
}

HuberRadii HuberRadii::uniform(const NetworkTopology& topo, double radius_m) {
  if (radius_m <= 0.0) throw std::domain_error("huber radius must be positive");
  HuberRadii r;
  r.edge.assign(topo.edges.size(), radius_m);
  r.link.assign(topo.anchor_links.size(), radius_m);
  return r;
}

HuberRadii HuberRadii::quadratic_sentinel(const NetworkTopology& topo, double scene_m,
                                          double factor) {
  return uniform(topo, factor * scene_m);
}

double lipschitz_constant(const NetworkTopology& topo) {
  return 2.0 + 2.0 * topo.max_degree() + topo.max_anchor_links();
}

Problem make_problem(const NetworkInstance& inst, const Measurements& meas,
                     const HuberRadii& radii) {
  inst.validate();
  if (meas.edge_range_m.size() != inst.topology.edges.size() ||
      meas.link_range_m.size() != inst.topology.anchor_links.size())
    throw ConfigError("measurements do not match topology");
  if (radii.edge.size() != inst.topology.edges.size() ||
      radii.link.size() != inst.topology.anchor_links.size())
    throw ConfigError("radii do not match topology");

  Problem prob;
  prob.instance = inst;
  prob.meas = meas;
  prob.radii = radii;
  prob.node_edges.resize(inst.topology.n);
  prob.node_links.resize(inst.topology.n);
  for (int e = 0; e < static_cast<int>(inst.topology.edges.size()); ++e) {
    const auto& [a, b] = inst.topology.edges[e];
    prob.node_edges[a].push_back({e, b, +1.0});
    prob.node_edges[b].push_back({e, a, -1.0});
  }
  for (int l = 0; l < static_cast<int>(inst.topology.anchor_links.size()); ++l) {
    const auto& [i, k] = inst.topology.anchor_links[l];
    prob.node_links[i].push_back({l, k});
  }
  prob.lipschitz = lipschitz_constant(inst.topology);
  return prob;
}

StackedPoint StackedPoint::zeros(const Problem& prob) {
  StackedPoint z;
  z.x = Eigen::VectorXd::Zero(prob.n() * prob.p());
  z.y = Eigen::VectorXd::Zero(prob.num_edges() * prob.p());
  z.w = Eigen::VectorXd::Zero(prob.num_links() * prob.p());
  return z;
}

StackedPoint StackedPoint::from_positions(const Problem& prob, const Eigen::VectorXd& x0) {
  if (x0.size() != static_cast<long>(prob.n()) * prob.p())
    throw ConfigError("position vector size does not match n*p");
  StackedPoint z = zeros(prob);
  z.x = x0;
  const int p = prob.p();
  for (int e = 0; e < prob.num_edges(); ++e) {
    const auto& [a, b] = prob.instance.topology.edges[e];
    z.y.segment(e * p, p) = x0.segment(a * p, p) - x0.segment(b * p, p);
    project_ball_inplace(z.y.segment(e * p, p), prob.meas.edge_range_m[e]);
  }
  for (int l = 0; l < prob.num_links(); ++l) {
    const auto& [i, k] = prob.instance.topology.anchor_links[l];
    z.w.segment(l * p, p) = x0.segment(i * p, p) - prob.instance.anchors.segment(k * p, p);
    project_ball_inplace(z.w.segment(l * p, p), prob.meas.link_range_m[l]);
  }
  return z;
}

Eigen::VectorXd StackedPoint::flat() const {
  Eigen::VectorXd v(x.size() + y.size() + w.size());
  v << x, y, w;
  return v;
}

StackedPoint StackedPoint::unflat(const Problem& prob, const Eigen::VectorXd& v) {
  const long nx = static_cast<long>(prob.n()) * prob.p();
  const long ny = static_cast<long>(prob.num_edges()) * prob.p();
  const long nw = static_cast<long>(prob.num_links()) * prob.p();
  if (v.size() != nx + ny + nw) throw ConfigError("flat vector has wrong size");
  StackedPoint z;
  z.x = v.segment(0, nx);
  z.y = v.segment(nx, ny);
  z.w = v.segment(nx + ny, nw);
  return z;
}

void StackedPoint::clamp_feasible(const Problem& prob) {
  const int p = prob.p();
  for (int e = 0; e < prob.num_edges(); ++e)
    project_ball_inplace(y.segment(e * p, p), prob.meas.edge_range_m[e]);
  for (int l = 0; l < prob.num_links(); ++l)
    project_ball_inplace(w.segment(l * p, p), prob.meas.link_range_m[l]);
}

bool StackedPoint::is_feasible(const Problem& prob, double rel_tol) const {
  const int p = prob.p();
  if (x.size() != static_cast<long>(prob.n()) * p ||
      y.size() != static_cast<long>(prob.num_edges()) * p ||
      w.size() != static_cast<long>(prob.num_links()) * p)
    return false;
  for (int e = 0; e < prob.num_edges(); ++e) {
    const double d = prob.meas.edge_range_m[e];
    if (y.segment(e * p, p).norm() > d * (1.0 + rel_tol) + rel_tol) return false;
  }
  for (int l = 0; l < prob.num_links(); ++l) {
    const double r = prob.meas.link_range_m[l];
    if (w.segment(l * p, p).norm() > r * (1.0 + rel_tol) + rel_tol) return false;
  }
  return true;
}

namespace {

// discrepancy |x_a - x_b| - d for edge e, |x_i - a_k| - r for link l
double edge_discrepancy(const Problem& prob, const Eigen::VectorXd& x, int e) {
  const int p = prob.p();
  const auto& [a, b] = prob.instance.topology.edges[e];
  return (x.segment(a * p, p) - x.segment(b * p, p)).norm() - prob.meas.edge_range_m[e];
}

double link_discrepancy(const Problem& prob, const Eigen::VectorXd& x, int l) {
  const int p = prob.p();
  const auto& [i, k] = prob.instance.topology.anchor_links[l];
  return (x.segment(i * p, p) - prob.instance.anchors.segment(k * p, p)).norm() -
         prob.meas.link_range_m[l];
}

}  // namespace

double nonconvex_cost_gR(const Problem& prob, const Eigen::VectorXd& x) {
  double total = 0.0;
  for (int e = 0; e < prob.num_edges(); ++e)
    total += 0.5 * huber(prob.radii.edge[e], edge_discrepancy(prob, x, e));
  for (int l = 0; l < prob.num_links(); ++l)
    total += 0.5 * huber(prob.radii.link[l], link_discrepancy(prob, x, l));
  return total;
}

double convex_cost_fR(const Problem& prob, const Eigen::VectorXd& x) {
  double total = 0.0;
  for (int e = 0; e < prob.num_edges(); ++e)
    total += 0.5 * huber(prob.radii.edge[e], std::max(0.0, edge_discrepancy(prob, x, e)));
  for (int l = 0; l < prob.num_links(); ++l)
    total += 0.5 * huber(prob.radii.link[l], std::max(0.0, link_discrepancy(prob, x, l)));
  return total;
}

double stacked_cost_F(const Problem& prob, const StackedPoint& z) {
  if (!z.is_feasible(prob))
    throw FeasibilityError("stacked point violates its ball constraints");
  const int p = prob.p();
  double total = 0.0;
  Eigen::VectorXd u(p);
  for (int e = 0; e < prob.num_edges(); ++e) {
    const auto& [a, b] = prob.instance.topology.edges[e];
    u = z.x.segment(a * p, p) - z.x.segment(b * p, p) - z.y.segment(e * p, p);
    total += 0.5 * psi(prob.radii.edge[e], u);
  }
  for (int l = 0; l < prob.num_links(); ++l) {
    const auto& [i, k] = prob.instance.topology.anchor_links[l];
    u = z.x.segment(i * p, p) - prob.instance.anchors.segment(k * p, p) - z.w.segment(l * p, p);
    total += 0.5 * psi(prob.radii.link[l], u);
  }
  return total;
}

void stacked_gradient(const Problem& prob, const StackedPoint& z, StackedPoint& grad) {
  const int p = prob.p();
  grad.x = Eigen::VectorXd::Zero(z.x.size());
  grad.y.resize(z.y.size());
  grad.w.resize(z.w.size());
  Eigen::VectorXd u(p);
  for (int e = 0; e < prob.num_edges(); ++e) {
    const auto& [a, b] = prob.instance.topology.edges[e];
    u = z.x.segment(a * p, p) - z.x.segment(b * p, p) - z.y.segment(e * p, p);
    project_ball_inplace(u, prob.radii.edge[e]);  // u is now the psi half-gradient
    grad.x.segment(a * p, p) += u;
    grad.x.segment(b * p, p) -= u;
    grad.y.segment(e * p, p) = -u;
  }
  for (int l = 0; l < prob.num_links(); ++l) {
    const auto& [i, k] = prob.instance.topology.anchor_links[l];
    u = z.x.segment(i * p, p) - prob.instance.anchors.segment(k * p, p) - z.w.segment(l * p, p);
    project_ball_inplace(u, prob.radii.link[l]);
    grad.x.segment(i * p, p) += u;
    grad.w.segment(l * p, p) = -u;
  }
}

namespace {

double term_radius(const Problem& prob, bool is_edge, int idx) {
  return is_edge ? prob.radii.edge[idx] : prob.radii.link[idx];
}

}  // namespace

double posterior_gap_bound(const Problem& prob, const Eigen::VectorXd& x_cvx, Loss loss) {
  double total = 0.0;
  for (int e = 0; e < prob.num_edges(); ++e) {
    const double disc = edge_discrepancy(prob, x_cvx, e);
    if (disc <= 0.0) total += 0.5 * loss_value(loss, term_radius(prob, true, e), disc);
  }
  for (int l = 0; l < prob.num_links(); ++l) {
    const double disc = link_discrepancy(prob, x_cvx, l);
    if (disc <= 0.0) total += 0.5 * loss_value(loss, term_radius(prob, false, l), disc);
  }
  return total;
}

double apriori_gap_bound(const Problem& prob, Loss loss) {
  double total = 0.0;
  for (int e = 0; e < prob.num_edges(); ++e)
    total += 0.5 * loss_value(loss, term_radius(prob, true, e), prob.meas.edge_range_m[e]);
  for (int l = 0; l < prob.num_links(); ++l)
    total += 0.5 * loss_value(loss, term_radius(prob, false, l), prob.meas.link_range_m[l]);
  return total;
}

// ---------------------------------------------------------------------------
// 1D star problems
// ---------------------------------------------------------------------------

double star_cost_1d(const Star1D& star, Loss loss, bool convexified, double x) {
  double total = 0.0;
  for (std::size_t k = 0; k < star.anchors.size(); ++k) {
    double disc = std::abs(x - star.anchors[k]) - star.ranges[k];
    if (convexified) disc = std::max(0.0, disc);
    total += 0.5 * loss_value(loss, star.radii[k], disc);
  }
  return total;
}

Minimum1D minimize_grid_1d(const std::function<double(double)>& f, double lo, double hi) {
  const double span = hi - lo;
  auto refine = [&](double a, double b) {
    // ternary search; the bracket comes from a fine grid so f is unimodal here
    while (b - a > 1e-13 * std::max(1.0, span)) {
      const double m1 = a + (b - a) / 3.0;
      const double m2 = b - (b - a) / 3.0;
      if (f(m1) <= f(m2))
        b = m2;
      else
        a = m1;
    }
    const double xm = 0.5 * (a + b);
    return Minimum1D{f(xm), xm};
  };

  Minimum1D best{std::numeric_limits<double>::infinity(), lo};
  double prev_value = std::numeric_limits<double>::infinity();
  for (int npts = 2049; npts <= 65537; npts = 2 * (npts - 1) + 1) {
    const double h = span / (npts - 1);
    std::vector<double> vals(npts);
    for (int i = 0; i < npts; ++i) vals[i] = f(lo + i * h);
    for (int i = 0; i < npts; ++i) {
      const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
      const bool right_ok = i == npts - 1 || vals[i] <= vals[i + 1];
      if (left_ok && right_ok) {
        const double a = lo + std::max(0, i - 1) * h;
        const double b = lo + std::min(npts - 1, i + 1) * h;
        const Minimum1D cand = refine(a, b);
        if (cand.value < best.value) best = cand;
      }
    }
    if (std::abs(best.value - prev_value) < 1e-7 * (1.0 + std::abs(best.value))) break;
    prev_value = best.value;
  }
  return best;
}

namespace {

std::pair<double, double> star_span(const Star1D& star) {
  double lo = *std::min_element(star.anchors.begin(), star.anchors.end());
  double hi = *std::max_element(star.anchors.begin(), star.anchors.end());
  double reach = 1.0;
  for (std::size_t k = 0; k < star.anchors.size(); ++k)
    reach = std::max(reach, star.ranges[k] + star.radii[k]);
  return {lo - reach - 1.0, hi + reach + 1.0};
}

}  // namespace

Minimum1D nonconvex_oracle_1d(const Star1D& star, Loss loss) {
  const auto [lo, hi] = star_span(star);
  return minimize_grid_1d([&](double x) { return star_cost_1d(star, loss, false, x); }, lo, hi);
}

Minimum1D convex_minimum_1d(const Star1D& star, Loss loss) {
  const auto [lo, hi] = star_span(star);
  return minimize_grid_1d([&](double x) { return star_cost_1d(star, loss, true, x); }, lo, hi);
}

double posterior_gap_bound_1d(const Star1D& star, Loss loss, double x_cvx) {
  double total = 0.0;
  for (std::size_t k = 0; k < star.anchors.size(); ++k) {
    const double disc = std::abs(x_cvx - star.anchors[k]) - star.ranges[k];
    if (disc <= 0.0) total += 0.5 * loss_value(loss, star.radii[k], disc);
  }
  return total;
}

double apriori_gap_bound_1d(const Star1D& star, Loss loss) {
  double total = 0.0;
  for (std::size_t k = 0; k < star.anchors.size(); ++k)
    total += 0.5 * loss_value(loss, star.radii[k], star.ranges[k]);
  return total;
}

}  // namespace rnloc
