#include "rnloc/solver_async.hpp"

#include <cmath>

#include "rnloc/errors.hpp"

namespace rnloc {

ActivationModel ActivationModel::uniform(int n) {
  ActivationModel act;
  act.prob = Eigen::VectorXd::Constant(n, 1.0 / n);
  return act;
}

void ActivationModel::validate() const {
  if (prob.size() == 0) throw ConfigError("empty activation model");
  if (prob.minCoeff() <= 0.0) throw ConfigError("activation probabilities must be positive");
  if (std::abs(prob.sum() - 1.0) > 1e-9) throw ConfigError("activation probabilities must sum to 1");
}

int ActivationModel::sample(Rng& rng) const {
  const double u = rng.uniform01();
  double cum = 0.0;
  const int n = static_cast<int>(prob.size());
  for (int i = 0; i < n; ++i) {
    cum += prob[i];
    if (u < cum) return i;
  }
  return n - 1;  // guard against accumulated rounding
}

AsyncState async_init(const Problem& prob, const Eigen::VectorXd& x0) {
  if (x0.size() != static_cast<long>(prob.n()) * prob.p())
    throw ConfigError("position vector size does not match n*p");
  const int p = prob.p();
  AsyncState st;
  st.x = x0;
  st.y.resize(2 * prob.num_edges() * p);
  st.w.resize(prob.num_links() * p);
  for (int e = 0; e < prob.num_edges(); ++e) {
    const auto& [a, b] = prob.instance.topology.edges[e];
    const double d = prob.meas.edge_range_m[e];
    st.y.segment(2 * e * p, p) = x0.segment(a * p, p) - x0.segment(b * p, p);
    project_ball_inplace(st.y.segment(2 * e * p, p), d);
    st.y.segment((2 * e + 1) * p, p) = x0.segment(b * p, p) - x0.segment(a * p, p);
    project_ball_inplace(st.y.segment((2 * e + 1) * p, p), d);
  }
  for (int l = 0; l < prob.num_links(); ++l) {
    const auto& [i, k] = prob.instance.topology.anchor_links[l];
    st.w.segment(l * p, p) = x0.segment(i * p, p) - prob.instance.anchors.segment(k * p, p);
    project_ball_inplace(st.w.segment(l * p, p), prob.meas.link_range_m[l]);
  }
  return st;
}

double duplicated_cost(const Problem& prob, const AsyncState& state) {
  const int p = prob.p();
  double total = 0.0;
  Eigen::VectorXd u(p);
  for (int i = 0; i < prob.n(); ++i) {
    for (const auto& inc : prob.node_edges[i]) {
      const int slot = directed_slot(inc.edge, inc.sign);
      u = state.x.segment(i * p, p) - state.x.segment(inc.nbr * p, p) -
          state.y.segment(slot * p, p);
      total += 0.25 * psi(prob.radii.edge[inc.edge], u);
    }
    for (const auto& inc : prob.node_links[i]) {
      u = state.x.segment(i * p, p) - prob.instance.anchors.segment(inc.anchor * p, p) -
          state.w.segment(inc.link * p, p);
      total += 0.5 * psi(prob.radii.link[inc.link], u);
    }
  }
  return total;
}

double local_reduced_cost(const Problem& prob, int node, EdgeWeight mode,
                          const Eigen::Ref<const Eigen::VectorXd>& xi,
                          const Eigen::VectorXd& x_all) {
  const int p = prob.p();
  const double ce = mode == EdgeWeight::Quarter ? 0.25 : 0.5;
  double total = 0.0;
  for (const auto& inc : prob.node_edges[node]) {
    const double dist = (xi - x_all.segment(inc.nbr * p, p)).norm();
    const double hinge = std::max(0.0, dist - prob.meas.edge_range_m[inc.edge]);
    total += ce * huber(prob.radii.edge[inc.edge], hinge);
  }
  for (const auto& inc : prob.node_links[node]) {
    const double dist = (xi - prob.instance.anchors.segment(inc.anchor * p, p)).norm();
    const double hinge = std::max(0.0, dist - prob.meas.link_range_m[inc.link]);
    total += 0.5 * huber(prob.radii.link[inc.link], hinge);
  }
  return total;
}

namespace {

// full local objective at a concrete block (x, y, w)
double local_block_cost(const Problem& prob, int node, EdgeWeight mode,
                        const Eigen::VectorXd& x_all, const Eigen::VectorXd& xi,
                        const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const int p = prob.p();
  const double ce = mode == EdgeWeight::Quarter ? 0.25 : 0.5;
  double total = 0.0;
  Eigen::VectorXd u(p);
  int j = 0;
  for (const auto& inc : prob.node_edges[node]) {
    u = xi - x_all.segment(inc.nbr * p, p) - y.segment(j * p, p);
    total += ce * psi(prob.radii.edge[inc.edge], u);
    ++j;
  }
  int k = 0;
  for (const auto& inc : prob.node_links[node]) {
    u = xi - prob.instance.anchors.segment(inc.anchor * p, p) - w.segment(k * p, p);
    total += 0.5 * psi(prob.radii.link[inc.link], u);
    ++k;
  }
  return total;
}

}  // namespace

LocalBlock local_solve(const Problem& prob, int node, const AsyncState& state,
                       const LocalConfig& cfg) {
  const int p = prob.p();
  const auto& edges = prob.node_edges[node];
  const auto& links = prob.node_links[node];
  const int deg = static_cast<int>(edges.size());
  const int nl = static_cast<int>(links.size());
  const double L = cfg.lipschitz_override > 0.0 ? cfg.lipschitz_override : prob.lipschitz;
  const double ce = cfg.edge_weight == EdgeWeight::Quarter ? 0.25 : 0.5;

  // warm start from the node's current block
  Eigen::VectorXd x_cur = state.x.segment(node * p, p), x_prev = x_cur;
  Eigen::VectorXd y_cur(deg * p), w_cur(nl * p);
  for (int j = 0; j < deg; ++j)
    y_cur.segment(j * p, p) = state.y.segment(directed_slot(edges[j].edge, edges[j].sign) * p, p);
  for (int k = 0; k < nl; ++k) w_cur.segment(k * p, p) = state.w.segment(links[k].link * p, p);
  Eigen::VectorXd y_prev = y_cur, w_prev = w_cur;

  LocalBlock best;
  best.x = x_cur;
  best.local_cost = local_reduced_cost(prob, node, cfg.edge_weight, x_cur, state.x);

  double cost_prev = local_block_cost(prob, node, cfg.edge_weight, state.x, x_cur, y_cur, w_cur);
  Eigen::VectorXd xe(p), ye(deg * p), we(nl * p), gx(p), r(p);
  Eigen::VectorXd x_next(p), y_next(deg * p), w_next(nl * p);

  int t = 1;
  for (; t <= cfg.max_inner_iters; ++t) {
    const double beta = (t - 2.0) / (t + 1.0);
    xe = x_cur + beta * (x_cur - x_prev);
    ye = y_cur + beta * (y_cur - y_prev);
    we = w_cur + beta * (w_cur - w_prev);

    gx.setZero();
    for (int j = 0; j < deg; ++j) {
      const auto& inc = edges[j];
      r = xe - state.x.segment(inc.nbr * p, p) - ye.segment(j * p, p);
      project_ball_inplace(r, prob.radii.edge[inc.edge]);
      gx += 2.0 * ce * r;
      y_next.segment(j * p, p) = ye.segment(j * p, p) + (2.0 * ce / L) * r;
      project_ball_inplace(y_next.segment(j * p, p), prob.meas.edge_range_m[inc.edge]);
    }
    for (int k = 0; k < nl; ++k) {
      const auto& inc = links[k];
      r = xe - prob.instance.anchors.segment(inc.anchor * p, p) - we.segment(k * p, p);
      project_ball_inplace(r, prob.radii.link[inc.link]);
      gx += r;  // 2 * 0.5
      w_next.segment(k * p, p) = we.segment(k * p, p) + r / L;
      project_ball_inplace(w_next.segment(k * p, p), prob.meas.link_range_m[inc.link]);
    }
    x_next = xe - gx / L;

    x_prev = x_cur;
    x_cur = x_next;
    y_prev.swap(y_cur);
    y_cur = y_next;
    w_prev.swap(w_cur);
    w_cur = w_next;

    const double red = local_reduced_cost(prob, node, cfg.edge_weight, x_cur, state.x);
    if (red < best.local_cost) {
      best.local_cost = red;
      best.x = x_cur;
    }

    const double cost =
        local_block_cost(prob, node, cfg.edge_weight, state.x, x_cur, y_cur, w_cur);
    if (!std::isfinite(cost)) throw DivergenceError("non-finite local cost", t);
    if (cfg.inner_tol > 0.0 && std::abs(cost_prev - cost) < cfg.inner_tol * (1.0 + std::abs(cost_prev)))
      break;
    cost_prev = cost;
  }
  best.inner_iterations = std::min(t, cfg.max_inner_iters);

  // finish the auxiliaries at their conditional optimum for the chosen x
  best.y.resize(deg * p);
  best.w.resize(nl * p);
  for (int j = 0; j < deg; ++j) {
    best.y.segment(j * p, p) = best.x - state.x.segment(edges[j].nbr * p, p);
    project_ball_inplace(best.y.segment(j * p, p), prob.meas.edge_range_m[edges[j].edge]);
  }
  for (int k = 0; k < nl; ++k) {
    best.w.segment(k * p, p) = best.x - prob.instance.anchors.segment(links[k].anchor * p, p);
    project_ball_inplace(best.w.segment(k * p, p), prob.meas.link_range_m[links[k].link]);
  }
  return best;
}

namespace {

// install a solved block and deliver the broadcast: neighbors refresh their
// mirrored copy of the shared edge from the received position
void apply_block(const Problem& prob, AsyncState& state, int node, const LocalBlock& blk) {
  const int p = prob.p();
  state.x.segment(node * p, p) = blk.x;
  const auto& edges = prob.node_edges[node];
  for (int j = 0; j < static_cast<int>(edges.size()); ++j) {
    const auto& inc = edges[j];
    state.y.segment(directed_slot(inc.edge, inc.sign) * p, p) = blk.y.segment(j * p, p);
    const int mirror = directed_slot(inc.edge, -inc.sign);
    state.y.segment(mirror * p, p) = state.x.segment(inc.nbr * p, p) - blk.x;
    project_ball_inplace(state.y.segment(mirror * p, p), prob.meas.edge_range_m[inc.edge]);
  }
  const auto& links = prob.node_links[node];
  for (int k = 0; k < static_cast<int>(links.size()); ++k)
    state.w.segment(links[k].link * p, p) = blk.w.segment(k * p, p);
}

}  // namespace

AsyncResult async_solve(const Problem& prob, const Eigen::VectorXd& x0,
                        const ActivationModel& act, const AsyncConfig& cfg, Rng& rng) {
  act.validate();
  if (act.prob.size() != prob.n()) throw ConfigError("activation model size does not match n");

  AsyncResult res;
  res.state = async_init(prob, x0);
  if (cfg.record_trajectory) res.cost_trace.push_back(duplicated_cost(prob, res.state));

  for (long t = 1; t <= cfg.num_activations; ++t) {
    const int i = act.sample(rng);
    const LocalBlock blk = local_solve(prob, i, res.state, cfg.local);
    apply_block(prob, res.state, i, blk);
    ++res.broadcasts;
    if (cfg.record_trajectory) {
      res.awakened.push_back(i);
      const double cost = duplicated_cost(prob, res.state);
      if (!std::isfinite(cost))
        throw DivergenceError("non-finite cost in async solve", static_cast<std::size_t>(t));
      res.cost_trace.push_back(cost);
    }
    if (cfg.phi_every > 0 && t % cfg.phi_every == 0) {
      LocalConfig exact = cfg.local;
      exact.edge_weight = EdgeWeight::ExactBlock;
      res.phi_at.push_back(t);
      res.phi_trace.push_back(expected_improvement(prob, res.state, act, exact));
    }
  }
  res.x = res.state.x;
  return res;
}

double expected_improvement(const Problem& prob, const AsyncState& state,
                            const ActivationModel& act, const LocalConfig& cfg) {
  act.validate();
  LocalConfig exact = cfg;
  exact.edge_weight = EdgeWeight::ExactBlock;
  double phi = 0.0;
  for (int i = 0; i < prob.n(); ++i) {
    // cost change is confined to the terms of node i's block (broadcast
    // included), so the full-network difference reduces to the local one
    const double before =
        local_reduced_cost(prob, i, EdgeWeight::ExactBlock, state.x.segment(i * prob.p(), prob.p()), state.x);
    const LocalBlock blk = local_solve(prob, i, state, exact);
    phi += act.prob[i] * (before - blk.local_cost);
  }
  return phi;
}

}  // namespace rnloc
