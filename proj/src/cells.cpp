#include "cells.hpp"

#include <cmath>

#include "error.hpp"

namespace polycrit {

void add_cell_rows(LpModel& model, const MultiplierCell& cell, const MultiplierPolytope& poly,
                   int y_off, int s_col) {
  const int m = static_cast<int>(cell.strata.size());
  const int nv = model.nvars();
  model.objective(s_col) = 1.0;
  model.set_bounds(s_col, -kInf, 1.0);
  for (int j = 0; j < poly.eq_lhs.rows(); ++j) {
    Vec row = Vec::Zero(nv);
    row.segment(y_off, m) = poly.eq_lhs.row(j).transpose();
    model.add_row(row, RowSense::Eq, poly.eq_rhs(j));
  }
  for (int i = 0; i < m; ++i) {
    const Stratum& st = cell.strata[i];
    if (st.point) {
      model.set_bounds(y_off + i, st.lo, st.lo);
      continue;
    }
    if (std::isfinite(st.lo)) {
      Vec row = Vec::Zero(nv);
      row(y_off + i) = 1.0;
      row(s_col) = -1.0;
      model.add_row(row, RowSense::Ge, st.lo);
    }
    if (std::isfinite(st.hi)) {
      Vec row = Vec::Zero(nv);
      row(y_off + i) = 1.0;
      row(s_col) = 1.0;
      model.add_row(row, RowSense::Le, st.hi);
    }
  }
}

std::vector<MultiplierCell> multiplier_cells(const MultiplierPolytope& poly,
                                             const std::vector<GPiece>& g, const LpOptions& lp,
                                             int max_cells) {
  std::vector<MultiplierCell> out;
  if (poly.empty) return out;
  const int m = static_cast<int>(g.size());
  std::vector<std::vector<Stratum>> strata;
  double count = 1.0;
  for (int i = 0; i < m; ++i) {
    strata.push_back(multiplier_strata(g[i], poly.w(i)));
    count *= static_cast<double>(strata.back().size());
  }
  if (count > max_cells) fail(Errc::BranchLimitExceeded, "too many multiplier faces");
  std::vector<size_t> pick(m, 0);
  for (;;) {
    MultiplierCell cell;
    for (int i = 0; i < m; ++i) cell.strata.push_back(strata[i][pick[i]]);
    LpModel model(m + 1);
    add_cell_rows(model, cell, poly, 0, m);
    const LpSolution s = solve_lp(model, lp);
    if (s.status == LpStatus::Optimal && s.x(m) > 0) {
      cell.interior = s.x.head(m);
      out.push_back(std::move(cell));
    }
    int i = 0;
    while (i < m && ++pick[i] == strata[i].size()) pick[i++] = 0;
    if (i == m) break;
  }
  return out;
}

std::vector<std::vector<int>> branch_tuples(const std::vector<ConeUnion>& cones, size_t cap) {
  double count = 1.0;
  for (const auto& c : cones) count *= static_cast<double>(c.members.size());
  if (count > static_cast<double>(cap)) fail(Errc::BranchLimitExceeded, "too many branch tuples");
  std::vector<std::vector<int>> out;
  if (count == 0) return out;
  std::vector<int> pick(cones.size(), 0);
  for (;;) {
    out.push_back(pick);
    size_t i = 0;
    while (i < cones.size() && ++pick[i] == static_cast<int>(cones[i].members.size())) pick[i++] = 0;
    if (i == cones.size()) break;
  }
  return out;
}

}  // namespace polycrit
