#pragma once

#include <limits>
#include <vector>

#include "linalg.hpp"

namespace polycrit {

enum class RowSense { Le, Ge, Eq };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOptions {
  /// Solve in exact rational arithmetic (the double data is converted exactly).
  bool exact = true;
  /// Positivity threshold for LP optimal values read by callers.
  double tol = 1e-9;
};

/// maximize c^T x subject to rows and bounds; bounds may be infinite.
struct LpModel {
  struct Row {
    Vec coef;
    RowSense sense;
    double rhs;
  };

  explicit LpModel(int nvars);

  int nvars() const { return static_cast<int>(objective.size()); }
  void set_bounds(int j, double lo, double hi);
  void add_row(const Vec& coef, RowSense sense, double rhs);

  Vec objective;
  Vec lower;
  Vec upper;
  std::vector<Row> rows;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Vec x;
};

/// Two-phase dense tableau simplex with Bland's rule.
LpSolution solve_lp(const LpModel& model, const LpOptions& opts = {});

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace polycrit
