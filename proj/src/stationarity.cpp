#include "stationarity.hpp"

#include <algorithm>
#include <cmath>

#include "cells.hpp"
#include "error.hpp"
#include "rational.hpp"

namespace polycrit {

double Residual::norm() const { return std::hypot(grad, graph); }

Residual residual(const CompositeProblem& p, const PointPD& pt, const Params& prm) {
  check_dims(p, &pt.x, &pt.y);
  check_dims(p, &prm.v, &prm.u);
  const Evaluation ev = evaluate(p, pt.x);
  Residual r;
  r.grad = (lagrangian_gradient(ev, pt.y) - prm.v).norm();
  double sq = 0.0;
  for (int i = 0; i < p.m; ++i) {
    const double d = project_graph(p.g[i], ev.Fx(i) + prm.u(i), pt.y(i)).second;
    sq += d * d;
  }
  r.graph = std::sqrt(sq);
  return r;
}

std::vector<GraphPoint> graph_points(const CompositeProblem& p, const Vec& w, const Vec& y,
                                     double tol) {
  std::vector<GraphPoint> out;
  for (int i = 0; i < p.m; ++i) {
    const auto [gp, dist] = project_graph(p.g[i], w(i), y(i));
    if (dist > tol) {
      fail(Errc::NotOnGraph, "coordinate " + std::to_string(i + 1) + " is off the graph by " +
                                 std::to_string(dist));
    }
    out.push_back(gp);
  }
  return out;
}

bool MultiplierPolytope::contains(const Vec& y, double tol) const {
  if (empty || y.size() != static_cast<int>(bounds.size())) return false;
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if (eq_lhs.rows() > 0 && (eq_lhs * y - eq_rhs).cwiseAbs().maxCoeff() > tol * scale) return false;
  for (size_t i = 0; i < bounds.size(); ++i)
    if (!bounds[i].contains(y(static_cast<int>(i)), tol * scale)) return false;
  return true;
}

namespace {

bool lex_greater(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) > b(i);
  }
  return false;
}

void enumerate_vertices(MultiplierPolytope& poly) {
  const int m = static_cast<int>(poly.bounds.size());
  // Per coordinate: 0 = free, 1 = at lo, 2 = at hi.
  std::vector<std::vector<int>> options(m);
  for (int i = 0; i < m; ++i) {
    const Interval& b = poly.bounds[i];
    if (b.lo == b.hi) {
      options[i] = {1};
      continue;
    }
    options[i] = {0};
    if (std::isfinite(b.lo)) options[i].push_back(1);
    if (std::isfinite(b.hi)) options[i].push_back(2);
  }
  std::vector<size_t> pick(m, 0);
  std::vector<Vec> found;
  for (;;) {
    std::vector<int> free_idx;
    Vec y = Vec::Zero(m);
    for (int i = 0; i < m; ++i) {
      const int o = options[i][pick[i]];
      if (o == 0) free_idx.push_back(i);
      if (o == 1) y(i) = poly.bounds[i].lo;
      if (o == 2) y(i) = poly.bounds[i].hi;
    }
    const int n = static_cast<int>(poly.eq_lhs.rows());
    Mat a(n, static_cast<int>(free_idx.size()));
    for (size_t k = 0; k < free_idx.size(); ++k) a.col(static_cast<int>(k)) = poly.eq_lhs.col(free_idx[k]);
    const Vec rhs = poly.eq_rhs - poly.eq_lhs * y;
    if (auto z = solve_exact(a, rhs)) {
      for (size_t k = 0; k < free_idx.size(); ++k) y(free_idx[k]) = (*z)(static_cast<int>(k));
      bool ok = true;
      for (int i = 0; i < m; ++i) ok = ok && poly.bounds[i].contains(y(i), 1e-12);
      if (ok) {
        bool dup = false;
        for (const auto& v : found) dup = dup || (v - y).cwiseAbs().maxCoeff() <= 1e-12;
        if (!dup) found.push_back(y);
      }
    }
    int i = 0;
    while (i < m && ++pick[i] == options[i].size()) pick[i++] = 0;
    if (i == m) break;
  }
  std::sort(found.begin(), found.end(), lex_greater);
  poly.vertices = std::move(found);
}

}  // namespace

MultiplierPolytope multiplier_polytope(const CompositeProblem& p, const Vec& x, const Params& prm,
                                       const LpOptions& lp) {
  check_dims(p, &x, nullptr);
  check_dims(p, &prm.v, &prm.u);
  const Evaluation ev = evaluate(p, x);
  MultiplierPolytope poly;
  poly.w = ev.Fx + prm.u;
  poly.eq_lhs = snap_small(Mat(ev.jac.transpose()));
  poly.eq_rhs = snap_small(Vec(prm.v - ev.grad_f0));
  for (int i = 0; i < p.m; ++i) poly.bounds.push_back(subdiff_interval(p.g[i], poly.w(i)));
  for (const auto& b : poly.bounds)
    if (b.empty()) return poly;
  LpModel model(p.m);
  for (int i = 0; i < p.m; ++i) model.set_bounds(i, poly.bounds[i].lo, poly.bounds[i].hi);
  for (int j = 0; j < p.n; ++j) model.add_row(poly.eq_lhs.row(j).transpose(), RowSense::Eq, poly.eq_rhs(j));
  if (solve_lp(model, lp).status != LpStatus::Optimal) return poly;
  poly.empty = false;
  if (p.m == 0) {
    poly.vertices.push_back(Vec::Zero(0));
    return poly;
  }
  // Recession cone.
  std::vector<Vec> eq_rows, in_rows;
  for (int j = 0; j < p.n; ++j) eq_rows.push_back(poly.eq_lhs.row(j).transpose());
  for (int i = 0; i < p.m; ++i) {
    const Interval& b = poly.bounds[i];
    Vec e = Vec::Zero(p.m);
    e(i) = 1.0;
    if (b.bounded()) {
      eq_rows.push_back(e);
    } else if (std::isfinite(b.lo)) {
      in_rows.push_back(-e);
    } else if (std::isfinite(b.hi)) {
      in_rows.push_back(e);
    }
  }
  Mat e(static_cast<int>(eq_rows.size()), p.m), a(static_cast<int>(in_rows.size()), p.m);
  for (size_t k = 0; k < eq_rows.size(); ++k) e.row(static_cast<int>(k)) = eq_rows[k].transpose();
  for (size_t k = 0; k < in_rows.size(); ++k) a.row(static_cast<int>(k)) = in_rows[k].transpose();
  const PolyhedralCone rec(e, a);
  std::vector<int> all(p.m);
  for (int i = 0; i < p.m; ++i) all[i] = i;
  poly.bounded = !lp_feasible_nonzero(rec, all, lp).has_value();
  if (!poly.bounded) {
    const ConeGenerators gens = generators(rec);
    for (const auto& l : gens.lineality) {
      Vec d = l / l.cwiseAbs().maxCoeff();
      for (int k = 0; k < d.size(); ++k) {
        if (std::fabs(d(k)) > 1e-12) {
          if (d(k) < 0) d = -d;
          break;
        }
      }
      poly.rays.push_back(d);
      poly.rays.push_back(-d);
    }
    for (const auto& r : gens.rays) poly.rays.push_back(r);
  }
  if (p.m > kVertexEnumerationMaxM) {
    poly.vertex_limit = true;
    return poly;
  }
  enumerate_vertices(poly);
  return poly;
}

CqResult check_cq(const CompositeProblem& p, const Vec& x, const LpOptions& lp) {
  check_dims(p, &x, nullptr);
  const Evaluation ev = evaluate(p, x);
  CqResult out;
  if (p.m == 0) return out;
  const Mat jt = snap_small(Mat(ev.jac.transpose()));
  std::vector<Vec> eq_rows, in_rows;
  for (int j = 0; j < p.n; ++j) eq_rows.push_back(jt.row(j).transpose());
  for (int i = 0; i < p.m; ++i) {
    const Interval k = horizon_subdiff(p.g[i], ev.Fx(i));
    Vec e = Vec::Zero(p.m);
    e(i) = 1.0;
    if (k.lo == 0.0 && k.hi == 0.0) {
      eq_rows.push_back(e);
    } else if (k.lo == 0.0) {
      in_rows.push_back(-e);
    } else if (k.hi == 0.0) {
      in_rows.push_back(e);
    }
  }
  Mat e(static_cast<int>(eq_rows.size()), p.m), a(static_cast<int>(in_rows.size()), p.m);
  for (size_t k = 0; k < eq_rows.size(); ++k) e.row(static_cast<int>(k)) = eq_rows[k].transpose();
  for (size_t k = 0; k < in_rows.size(); ++k) a.row(static_cast<int>(k)) = in_rows[k].transpose();
  std::vector<int> all(p.m);
  for (int i = 0; i < p.m; ++i) all[i] = i;
  out.certificate = lp_feasible_nonzero(PolyhedralCone(e, a), all, lp);
  out.holds = !out.certificate.has_value();
  return out;
}

bool tangent_gph_M1(const CompositeProblem& p, const PointPD& pt, const Params& prm,
                    const DirectionPD& d, ConeKind kind, double tol) {
  check_dims(p, &d.dx, &d.dy);
  check_dims(p, &d.dv, &d.du);
  const Residual r = residual(p, pt, prm);
  if (r.norm() > kStationarityTol) fail(Errc::NotStationary, "point does not solve the stationarity system");
  const Evaluation ev = evaluate(p, pt.x);
  const Mat h = lagrangian_hessian(ev, pt.y);
  const double scale = std::max({1.0, d.dx.size() ? d.dx.cwiseAbs().maxCoeff() : 0.0,
                                 d.dy.size() ? d.dy.cwiseAbs().maxCoeff() : 0.0});
  const Vec lin = h * d.dx + ev.jac.transpose() * d.dy - d.dv;
  if (lin.size() > 0 && lin.cwiseAbs().maxCoeff() > tol * scale) return false;
  const auto gps = graph_points(p, ev.Fx + prm.u, pt.y);
  for (int i = 0; i < p.m; ++i) {
    Vec ab(2);
    ab << ev.jac.row(i).dot(d.dx) + d.du(i), d.dy(i);
    if (!tangent_cone_graph(p.g[i], gps[i], kind).contains(ab, tol)) return false;
  }
  return true;
}

bool tangent_gph_M(const CompositeProblem& p, const Vec& x, const Params& prm, const Vec& dv,
                   const Vec& du, const Vec& dx, ConeKind kind, double tol, const LpOptions& lp) {
  check_dims(p, &x, nullptr);
  check_dims(p, &dx, &du);
  check_dims(p, &dv, nullptr);
  const MultiplierPolytope poly = multiplier_polytope(p, x, prm, lp);
  if (poly.empty) fail(Errc::NotStationary, "no multiplier exists at x");
  const Evaluation ev = evaluate(p, x);
  const int n = p.n, m = p.m;
  const Vec base = snap_small(Vec(dv - ev.hess_f0 * dx));
  Mat hy(n, m);  // column i: hessF_i dx
  for (int i = 0; i < m; ++i) hy.col(i) = ev.hessF[i] * dx;
  hy = snap_small(hy);
  const Mat jac = snap_small(ev.jac);
  Vec a = jac * dx + du;
  for (const auto& cell : multiplier_cells(poly, p.g, lp)) {
    std::vector<ConeUnion> cones;
    for (int i = 0; i < m; ++i)
      cones.push_back(tangent_cone_graph(p.g[i], GraphPoint{poly.w(i), cell.interior(i), 0}, kind));
    for (const auto& tuple : branch_tuples(cones)) {
      // Variables: y (m), dy (m), s.
      LpModel model(2 * m + 1);
      add_cell_rows(model, cell, poly, 0, 2 * m);
      for (int j = 0; j < n; ++j) {
        Vec row = Vec::Zero(2 * m + 1);
        row.head(m) = hy.row(j).transpose();
        row.segment(m, m) = jac.col(j);
        model.add_row(row, RowSense::Le, base(j) + tol);
        model.add_row(row, RowSense::Ge, base(j) - tol);
      }
      for (int i = 0; i < m; ++i) {
        const PolyhedralCone& c = cones[i].members[tuple[i]];
        for (int r = 0; r < c.eq.rows(); ++r) {
          Vec row = Vec::Zero(2 * m + 1);
          row(m + i) = c.eq(r, 1);
          model.add_row(row, RowSense::Le, -c.eq(r, 0) * a(i) + tol);
          model.add_row(row, RowSense::Ge, -c.eq(r, 0) * a(i) - tol);
        }
        for (int r = 0; r < c.ineq.rows(); ++r) {
          Vec row = Vec::Zero(2 * m + 1);
          row(m + i) = c.ineq(r, 1);
          model.add_row(row, RowSense::Le, -c.ineq(r, 0) * a(i) + tol);
        }
      }
      const LpSolution s = solve_lp(model, lp);
      if (s.status == LpStatus::Optimal && s.x(2 * m) > 0) return true;
    }
  }
  return false;
}

bool tangent_gph_M2(const CompositeProblem& p, const Vec& x, const Params& prm, const Vec& dv,
                    const Vec& du, const Vec& dx, const Vec& dw, ConeKind kind, double tol,
                    const LpOptions& lp) {
  check_dims(p, &x, &dw);
  const Evaluation ev = evaluate(p, x);
  const Vec lifted = ev.jac * dx + du;
  const double scale = std::max(1.0, dx.size() ? dx.cwiseAbs().maxCoeff() : 0.0);
  if (p.m > 0 && (dw - lifted).cwiseAbs().maxCoeff() > tol * scale) return false;
  return tangent_gph_M(p, x, prm, dv, du, dx, kind, tol, lp);
}

}  // namespace polycrit
