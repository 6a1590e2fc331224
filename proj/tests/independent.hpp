#pragma once

#include <vector>

#include "cone.hpp"
#include "criticality.hpp"
#include "problem.hpp"

namespace testing {

/**
 * Branch-by-branch decision of the linearized stationarity system in z = (dx, dy).
 * Rows: H dx + J^T dy = 0 and (J_i dx, dy_i) in the chosen member of each coordinate cone.
 * With `pin_dx`, dx = 0 is imposed and the search is over dy (uniqueness condition).
 * Returns true when some branch has a solution that is nonzero on the tested block.
 */
inline bool independent_branch_search(const polycrit::CompositeProblem& p, const polycrit::Vec& x,
                                      const polycrit::Vec& y, polycrit::ConeKind kind, bool pin_dx) {
  using polycrit::Mat;
  const int n = p.n, m = p.m, k = n + m;
  const polycrit::Evaluation ev = polycrit::evaluate(p, x);
  const Mat H = polycrit::lagrangian_xderivs(p, x, y).hessxx;
  std::vector<polycrit::ConeUnion> cones;
  for (int i = 0; i < m; ++i)
    cones.push_back(polycrit::tangent_cone_graph(p.g[i], polycrit::graph_point(p.g[i], ev.Fx(i), y(i), 1e-8), kind));
  std::vector<int> coords;
  for (int j = 0; j < (pin_dx ? m : n); ++j) coords.push_back(pin_dx ? n + j : j);
  std::vector<size_t> pick(m, 0);
  while (true) {
    std::vector<Eigen::RowVectorXd> eq, ineq;
    for (int r = 0; r < n; ++r) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k);
      row.head(n) = H.row(r);
      row.tail(m) = ev.jac.col(r).transpose();
      eq.push_back(row);
    }
    if (pin_dx)
      for (int j = 0; j < n; ++j) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k);
        row(j) = 1;
        eq.push_back(row);
      }
    for (int i = 0; i < m; ++i) {
      const polycrit::PolyhedralCone& c = cones[i].members[pick[i]];
      const auto lift = [&](const Eigen::RowVectorXd& r2) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k);
        row.head(n) = r2(0) * ev.jac.row(i);
        row(n + i) = r2(1);
        return row;
      };
      for (int r = 0; r < c.eq.rows(); ++r) eq.push_back(lift(c.eq.row(r)));
      for (int r = 0; r < c.ineq.rows(); ++r) ineq.push_back(lift(c.ineq.row(r)));
    }
    Mat E(eq.size(), k), A(ineq.size(), k);
    for (size_t r = 0; r < eq.size(); ++r) E.row(r) = eq[r];
    for (size_t r = 0; r < ineq.size(); ++r) A.row(r) = ineq[r];
    if (polycrit::lp_feasible_nonzero(polycrit::PolyhedralCone(E, A), coords)) return true;
    int i = 0;
    while (i < m && ++pick[i] == cones[i].members.size()) pick[i++] = 0;
    if (i == m) return false;
  }
}

inline bool independent_noncritical(const polycrit::CompositeProblem& p, const polycrit::Vec& x,
                                    const polycrit::Vec& y, polycrit::ConeKind kind) {
  return !independent_branch_search(p, x, y, kind, false);
}

inline bool independent_uniqueness(const polycrit::CompositeProblem& p, const polycrit::Vec& x,
                                   const polycrit::Vec& y, polycrit::ConeKind kind) {
  return !independent_branch_search(p, x, y, kind, true);
}

}  // namespace testing
