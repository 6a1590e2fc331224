#pragma once

#include <vector>

#include "stationarity.hpp"

namespace polycrit {

/// Relatively open piece of the multiplier set on which every coordinate
/// stays in one stratum of its subdifferential.
struct MultiplierCell {
  std::vector<Stratum> strata;
  Vec interior;
};

constexpr int kMaxFaces = 1 << 16;

/// Nonempty cells of the multiplier set, in lexicographic stratum order.
std::vector<MultiplierCell> multiplier_cells(const MultiplierPolytope& poly,
                                             const std::vector<GPiece>& g, const LpOptions& lp,
                                             int max_cells = kMaxFaces);

/**
 * Adds the cell description to an LP whose multiplier variables start at
 * column y_off. Column s_col is a slack maximized by the objective; the cell
 * is met with an interior point iff the optimal slack is positive.
 */
void add_cell_rows(LpModel& model, const MultiplierCell& cell, const MultiplierPolytope& poly,
                   int y_off, int s_col);

/// All member-index tuples of a list of unions, first coordinate fastest.
std::vector<std::vector<int>> branch_tuples(const std::vector<ConeUnion>& cones,
                                            size_t cap = kMaxFaces);

}  // namespace polycrit
