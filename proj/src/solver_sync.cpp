#include "rnloc/solver_sync.hpp"

#include <cassert>
#include <cmath>

#include <Eigen/Sparse>

#include "rnloc/errors.hpp"

namespace rnloc {

namespace {

// Directed auxiliary slot: the copy of edge e owned by its smaller endpoint
// lives at block 2e, the other endpoint's copy at 2e+1. The two copies stay
// exact mirrors of each other (checked in debug builds).
inline int own_slot(int edge, double sign) { return 2 * edge + (sign > 0.0 ? 0 : 1); }

StackedPoint canonical_point(const Problem& prob, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y_dir, const Eigen::VectorXd& w) {
  StackedPoint z;
  z.x = x;
  z.w = w;
  const int p = prob.p();
  z.y.resize(prob.num_edges() * p);
  for (int e = 0; e < prob.num_edges(); ++e) z.y.segment(e * p, p) = y_dir.segment(2 * e * p, p);
  return z;
}

}  // namespace

SyncResult sync_solve(const Problem& prob, const Eigen::VectorXd& x0, const SyncConfig& cfg) {
  const int n = prob.n();
  const int p = prob.p();
  const double L = cfg.lipschitz_override > 0.0 ? cfg.lipschitz_override : prob.lipschitz;

  // node-owned state; *_prev holds t-2 values during round t
  Eigen::VectorXd x_cur = x0, x_prev = x0;
  Eigen::VectorXd y_cur(2 * prob.num_edges() * p), w_cur(prob.num_links() * p);
  for (int e = 0; e < prob.num_edges(); ++e) {
    const auto& [a, b] = prob.instance.topology.edges[e];
    const double d = prob.meas.edge_range_m[e];
    y_cur.segment(2 * e * p, p) = x0.segment(a * p, p) - x0.segment(b * p, p);
    project_ball_inplace(y_cur.segment(2 * e * p, p), d);
    y_cur.segment((2 * e + 1) * p, p) = -y_cur.segment(2 * e * p, p);
  }
  for (int l = 0; l < prob.num_links(); ++l) {
    const auto& [i, k] = prob.instance.topology.anchor_links[l];
    w_cur.segment(l * p, p) = x0.segment(i * p, p) - prob.instance.anchors.segment(k * p, p);
    project_ball_inplace(w_cur.segment(l * p, p), prob.meas.link_range_m[l]);
  }
  Eigen::VectorXd y_prev = y_cur, w_prev = w_cur;
  Eigen::VectorXd xi(n * p), x_next(n * p), y_next(y_cur.size()), w_next(w_cur.size());

  SyncResult res;
  if (cfg.record_trajectory)
    res.cost_trace.push_back(stacked_cost_F(prob, canonical_point(prob, x_cur, y_cur, w_cur)));

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const double beta = (t - 2.0) / (t + 1.0);

    // broadcast phase: every node extrapolates and publishes xi
    xi = x_cur + beta * (x_cur - x_prev);

    // update phase: each node reads its inbox (neighbors' xi) and its own state
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd gx = Eigen::VectorXd::Zero(p);
      Eigen::VectorXd ups(p), r(p);
      for (const auto& inc : prob.node_edges[i]) {
        const int slot = own_slot(inc.edge, inc.sign);
        const double d = prob.meas.edge_range_m[inc.edge];
        ups = y_cur.segment(slot * p, p) +
              beta * (y_cur.segment(slot * p, p) - y_prev.segment(slot * p, p));
        r = xi.segment(i * p, p) - xi.segment(inc.nbr * p, p) - ups;
        project_ball_inplace(r, prob.radii.edge[inc.edge]);
        y_next.segment(slot * p, p) = ups + r / L;
        project_ball_inplace(y_next.segment(slot * p, p), d);
        gx += r;
      }
      for (const auto& inc : prob.node_links[i]) {
        const double rad = prob.meas.link_range_m[inc.link];
        ups = w_cur.segment(inc.link * p, p) +
              beta * (w_cur.segment(inc.link * p, p) - w_prev.segment(inc.link * p, p));
        r = xi.segment(i * p, p) - prob.instance.anchors.segment(inc.anchor * p, p) - ups;
        project_ball_inplace(r, prob.radii.link[inc.link]);
        w_next.segment(inc.link * p, p) = ups + r / L;
        project_ball_inplace(w_next.segment(inc.link * p, p), rad);
        gx += r;
      }
      x_next.segment(i * p, p) = xi.segment(i * p, p) - gx / L;
    }

#ifndef NDEBUG
    for (int e = 0; e < prob.num_edges(); ++e)
      for (int d = 0; d < p; ++d)
        assert(y_next[2 * e * p + d] == -y_next[(2 * e + 1) * p + d]);
#endif

    x_prev.swap(x_cur);
    x_cur.swap(x_next);
    y_prev.swap(y_cur);
    y_cur.swap(y_next);
    w_prev.swap(w_cur);
    w_cur.swap(w_next);

    res.iterations = t;
    res.broadcasts += n;

    double max_step = 0.0;
    for (int i = 0; i < n; ++i) {
      const double step = (x_cur.segment(i * p, p) - x_prev.segment(i * p, p)).norm() /
                          (1.0 + x_cur.segment(i * p, p).norm());
      max_step = std::max(max_step, step);
    }
    res.step_trace.push_back(max_step);

    if (cfg.record_trajectory) {
      const double F = stacked_cost_F(prob, canonical_point(prob, x_cur, y_cur, w_cur));
      if (!std::isfinite(F)) throw DivergenceError("non-finite cost in sync solve", t);
      res.cost_trace.push_back(F);
    } else if (!x_cur.allFinite()) {
      throw DivergenceError("non-finite iterate in sync solve", t);
    }

    if (cfg.on_iterate) cfg.on_iterate(t, x_cur);

    if (cfg.stop_tol > 0.0 && max_step < cfg.stop_tol) {
      res.status = SolveStatus::Converged;
      break;
    }
  }

  res.x = x_cur;
  res.z = canonical_point(prob, x_cur, y_cur, w_cur);
  return res;
}

SyncResult reference_solve(const Problem& prob, const Eigen::VectorXd& x0, const SyncConfig& cfg) {
  const int n = prob.n();
  const int p = prob.p();
  const int ne = prob.num_edges();
  const int nl = prob.num_links();
  const long nx = static_cast<long>(n) * p;
  const long ny = static_cast<long>(ne) * p;
  const long nw = static_cast<long>(nl) * p;
  const long nz = nx + ny + nw;
  const double L = cfg.lipschitz_override > 0.0 ? cfg.lipschitz_override : prob.lipschitz;

  // B = [C (x) I_p, -I, 0] maps z to the stacked edge residuals, E = [M, 0, -I]
  // to the anchor residuals (alpha holds the anchor coordinates).
  const Eigen::SparseMatrix<double> C = incidence_matrix(prob.instance.topology);
  std::vector<Eigen::Triplet<double>> tb, te;
  for (int outer = 0; outer < C.outerSize(); ++outer)
    for (Eigen::SparseMatrix<double>::InnerIterator it(C, outer); it; ++it)
      for (int d = 0; d < p; ++d)
        tb.emplace_back(static_cast<int>(it.row()) * p + d,
                        static_cast<int>(it.col()) * p + d, it.value());
  for (int e = 0; e < ne; ++e)
    for (int d = 0; d < p; ++d) tb.emplace_back(e * p + d, nx + e * p + d, -1.0);
  Eigen::SparseMatrix<double> B(ny, nz);
  B.setFromTriplets(tb.begin(), tb.end());

  Eigen::VectorXd alpha(nw);
  for (int l = 0; l < nl; ++l) {
    const auto& [i, k] = prob.instance.topology.anchor_links[l];
    for (int d = 0; d < p; ++d) te.emplace_back(l * p + d, i * p + d, 1.0);
    for (int d = 0; d < p; ++d) te.emplace_back(l * p + d, nx + ny + l * p + d, -1.0);
    alpha.segment(l * p, p) = prob.instance.anchors.segment(k * p, p);
  }
  Eigen::SparseMatrix<double> E(nw, nz);
  E.setFromTriplets(te.begin(), te.end());

  Eigen::VectorXd z = StackedPoint::from_positions(prob, x0).flat();
  Eigen::VectorXd z_prev = z;

  SyncResult res;
  if (cfg.record_trajectory)
    res.cost_trace.push_back(stacked_cost_F(prob, StackedPoint::unflat(prob, z)));

  Eigen::VectorXd zeta(nz), ue(ny), ul(nw), znext(nz);
  for (int t = 1; t <= cfg.max_iters; ++t) {
    const double beta = (t - 2.0) / (t + 1.0);
    zeta = z + beta * (z - z_prev);

    ue = B * zeta;
    ul = E * zeta - alpha;
    for (int e = 0; e < ne; ++e) project_ball_inplace(ue.segment(e * p, p), prob.radii.edge[e]);
    for (int l = 0; l < nl; ++l) project_ball_inplace(ul.segment(l * p, p), prob.radii.link[l]);

    znext = zeta - (B.transpose() * ue + E.transpose() * ul) / L;
    for (int e = 0; e < ne; ++e)
      project_ball_inplace(znext.segment(nx + e * p, p), prob.meas.edge_range_m[e]);
    for (int l = 0; l < nl; ++l)
      project_ball_inplace(znext.segment(nx + ny + l * p, p), prob.meas.link_range_m[l]);

    z_prev.swap(z);
    z.swap(znext);

    res.iterations = t;
    res.broadcasts += n;

    double max_step = 0.0;
    for (int i = 0; i < n; ++i) {
      const double step = (z.segment(i * p, p) - z_prev.segment(i * p, p)).norm() /
                          (1.0 + z.segment(i * p, p).norm());
      max_step = std::max(max_step, step);
    }
    res.step_trace.push_back(max_step);

    if (cfg.record_trajectory) {
      const double F = stacked_cost_F(prob, StackedPoint::unflat(prob, z));
      if (!std::isfinite(F)) throw DivergenceError("non-finite cost in reference solve", t);
      res.cost_trace.push_back(F);
    } else if (!z.allFinite()) {
      throw DivergenceError("non-finite iterate in reference solve", t);
    }

    if (cfg.on_iterate) cfg.on_iterate(t, Eigen::VectorXd(z.segment(0, nx)));

    if (cfg.stop_tol > 0.0 && max_step < cfg.stop_tol) {
      res.status = SolveStatus::Converged;
      break;
    }
  }

  res.z = StackedPoint::unflat(prob, z);
  res.x = res.z.x;
  return res;
}

}  // namespace rnloc
