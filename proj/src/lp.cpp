#include "lp.hpp"

#include <boost/multiprecision/gmp.hpp>
#include <cmath>

#include "error.hpp"

namespace polycrit {

namespace {

using Rational = boost::multiprecision::mpq_rational;

template <class S>
struct Arith;

template <>
struct Arith<double> {
  static constexpr double eps = 1e-11;
  static double from(double v) { return v; }
  static double to(double v) { return v; }
  static bool pos(double v) { return v > eps; }
  static bool nonzero(double v) { return std::fabs(v) > eps; }
};

template <>
struct Arith<Rational> {
  static Rational from(double v) { return Rational(v); }
  static double to(const Rational& v) { return v.convert_to<double>(); }
  static bool pos(const Rational& v) { return v > 0; }
  static bool nonzero(const Rational& v) { return v != 0; }
};

enum class VarMap { Shift, Flip, Split };

template <class S>
class Simplex {
  using A = Arith<S>;

 public:
  explicit Simplex(const LpModel& model) : model_(model) {}

  LpSolution run() {
    build();
    LpSolution out;
    // Phase 1: maximize -sum of artificials.
    std::vector<S> cost(ncols_, S(0));
    for (int j = art_begin_; j < ncols_; ++j) cost[j] = S(-1);
    price(cost);
    if (!iterate(ncols_)) fail(Errc::Internal, "phase 1 unbounded");
    if (A::pos(obj_[ncols_])) {  // obj_ holds minus the objective value
      out.status = LpStatus::Infeasible;
      return out;
    }
    drive_out_artificials();
    std::vector<S> cost2(ncols_, S(0));
    for (int j = 0; j < nstruct_; ++j) cost2[j] = c_[j];
    price(cost2);
    if (!iterate(art_begin_)) {
      out.status = LpStatus::Unbounded;
      return out;
    }
    std::vector<S> z(ncols_, S(0));
    for (size_t i = 0; i < basis_.size(); ++i) z[basis_[i]] = tab_[i][ncols_];
    const int n = model_.nvars();
    out.x = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
      const auto& m = map_[j];
      S value(0);
      switch (m.kind) {
        case VarMap::Shift: value = A::from(model_.lower(j)) + z[m.col]; break;
        case VarMap::Flip: value = A::from(model_.upper(j)) - z[m.col]; break;
        case VarMap::Split: value = z[m.col] - z[m.col + 1]; break;
      }
      out.x(j) = A::to(value);
    }
    out.status = LpStatus::Optimal;
    out.objective = model_.objective.dot(out.x);
    return out;
  }

 private:
  struct Map {
    VarMap kind;
    int col;
  };

  struct StdRow {
    std::vector<S> coef;
    RowSense sense;
    S rhs;
  };

  void build() {
    const int n = model_.nvars();
    std::vector<StdRow> rows;
    nstruct_ = 0;
    for (int j = 0; j < n; ++j) {
      const double lo = model_.lower(j), hi = model_.upper(j);
      if (lo > hi) {
        infeasible_bounds_ = true;
      }
      if (std::isfinite(lo)) {
        map_.push_back({VarMap::Shift, nstruct_++});
      } else if (std::isfinite(hi)) {
        map_.push_back({VarMap::Flip, nstruct_++});
      } else {
        map_.push_back({VarMap::Split, nstruct_});
        nstruct_ += 2;
      }
    }
    c_.assign(nstruct_, S(0));
    for (int j = 0; j < n; ++j) {
      const S cj = A::from(model_.objective(j));
      const auto& m = map_[j];
      if (m.kind == VarMap::Shift) c_[m.col] = cj;
      if (m.kind == VarMap::Flip) c_[m.col] = -cj;
      if (m.kind == VarMap::Split) {
        c_[m.col] = cj;
        c_[m.col + 1] = -cj;
      }
    }
    for (const auto& row : model_.rows) {
      if (row.coef.size() != n) fail(Errc::DimensionMismatch, "LP row has wrong length");
      StdRow r{std::vector<S>(nstruct_, S(0)), row.sense, A::from(row.rhs)};
      for (int j = 0; j < n; ++j) {
        if (row.coef(j) == 0.0) continue;
        const S a = A::from(row.coef(j));
        const auto& m = map_[j];
        if (m.kind == VarMap::Shift) {
          r.coef[m.col] = a;
          r.rhs -= a * A::from(model_.lower(j));
        } else if (m.kind == VarMap::Flip) {
          r.coef[m.col] = -a;
          r.rhs -= a * A::from(model_.upper(j));
        } else {
          r.coef[m.col] = a;
          r.coef[m.col + 1] = -a;
        }
      }
      rows.push_back(std::move(r));
    }
    for (int j = 0; j < n; ++j) {
      const auto& m = map_[j];
      if (m.kind == VarMap::Shift && std::isfinite(model_.upper(j))) {
        StdRow r{std::vector<S>(nstruct_, S(0)), RowSense::Le,
                 A::from(model_.upper(j)) - A::from(model_.lower(j))};
        r.coef[m.col] = S(1);
        rows.push_back(std::move(r));
      }
    }
    if (infeasible_bounds_) {
      // Encode as the infeasible row 0 >= 1.
      rows.push_back(StdRow{std::vector<S>(nstruct_, S(0)), RowSense::Ge, S(1)});
    }
    for (auto& r : rows) {
      if (r.rhs < 0) {
        for (auto& a : r.coef) a = -a;
        r.rhs = -r.rhs;
        if (r.sense == RowSense::Le) {
          r.sense = RowSense::Ge;
        } else if (r.sense == RowSense::Ge) {
          r.sense = RowSense::Le;
        }
      }
    }
    int nslack = 0, nart = 0;
    for (const auto& r : rows) {
      if (r.sense != RowSense::Eq) ++nslack;
      if (r.sense != RowSense::Le) ++nart;
    }
    art_begin_ = nstruct_ + nslack;
    ncols_ = art_begin_ + nart;
    tab_.assign(rows.size(), std::vector<S>(ncols_ + 1, S(0)));
    basis_.assign(rows.size(), -1);
    int slack = nstruct_, art = art_begin_;
    for (size_t i = 0; i < rows.size(); ++i) {
      auto& t = tab_[i];
      for (int j = 0; j < nstruct_; ++j) t[j] = rows[i].coef[j];
      t[ncols_] = rows[i].rhs;
      if (rows[i].sense == RowSense::Le) {
        t[slack] = S(1);
        basis_[i] = slack++;
      } else if (rows[i].sense == RowSense::Ge) {
        t[slack++] = S(-1);
        t[art] = S(1);
        basis_[i] = art++;
      } else {
        t[art] = S(1);
        basis_[i] = art++;
      }
    }
  }

  // Reduced costs d_j = c_j - c_B^T T_j; obj_[ncols_] = -c_B^T b.
  void price(const std::vector<S>& cost) {
    obj_.assign(ncols_ + 1, S(0));
    for (int j = 0; j < ncols_; ++j) obj_[j] = cost[j];
    for (size_t i = 0; i < basis_.size(); ++i) {
      const S cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (int j = 0; j <= ncols_; ++j) obj_[j] -= cb * tab_[i][j];
    }
  }

  void pivot(size_t r, int col) {
    auto& prow = tab_[r];
    const S p = prow[col];
    for (auto& v : prow) v /= p;
    for (size_t i = 0; i < tab_.size(); ++i) {
      if (i == r) continue;
      const S f = tab_[i][col];
      if (f == 0) continue;
      for (int j = 0; j <= ncols_; ++j) tab_[i][j] -= f * prow[j];
      tab_[i][col] = S(0);
    }
    const S f = obj_[col];
    if (f != 0) {
      for (int j = 0; j <= ncols_; ++j) obj_[j] -= f * prow[j];
      obj_[col] = S(0);
    }
    basis_[r] = col;
  }

  // Returns false when unbounded. Columns >= limit never enter.
  bool iterate(int limit) {
    for (long guard = 0;; ++guard) {
      if (guard > 1000000) fail(Errc::Internal, "simplex iteration limit");
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        if (A::pos(obj_[j])) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      S best(0);
      for (size_t i = 0; i < tab_.size(); ++i) {
        const S a = tab_[i][enter];
        if (!A::pos(a)) continue;
        const S ratio = tab_[i][ncols_] / a;
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(static_cast<size_t>(leave), enter);
    }
  }

  void drive_out_artificials() {
    for (size_t i = 0; i < basis_.size();) {
      if (basis_[i] < art_begin_) {
        ++i;
        continue;
      }
      int col = -1;
      for (int j = 0; j < art_begin_; ++j) {
        if (A::nonzero(tab_[i][j])) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        ++i;
      } else {
        tab_.erase(tab_.begin() + static_cast<long>(i));
        basis_.erase(basis_.begin() + static_cast<long>(i));
      }
    }
  }

  const LpModel& model_;
  std::vector<Map> map_;
  std::vector<S> c_;
  std::vector<std::vector<S>> tab_;
  std::vector<S> obj_;
  std::vector<int> basis_;
  int nstruct_ = 0;
  int art_begin_ = 0;
  int ncols_ = 0;
  bool infeasible_bounds_ = false;
};

}  // namespace

LpModel::LpModel(int nvars)
    : objective(Vec::Zero(nvars)),
      lower(Vec::Constant(nvars, -kInf)),
      upper(Vec::Constant(nvars, kInf)) {}

void LpModel::set_bounds(int j, double lo, double hi) {
  lower(j) = lo;
  upper(j) = hi;
}

void LpModel::add_row(const Vec& coef, RowSense sense, double rhs) {
  if (coef.size() != nvars()) fail(Errc::DimensionMismatch, "LP row has wrong length");
  rows.push_back(Row{coef, sense, rhs});
}

LpSolution solve_lp(const LpModel& model, const LpOptions& opts) {
  for (int j = 0; j < model.nvars(); ++j) {
    if (!std::isfinite(model.objective(j))) fail(Errc::InvalidArgument, "nonfinite LP objective");
  }
  for (const auto& r : model.rows) {
    if (!r.coef.allFinite() || !std::isfinite(r.rhs)) {
      fail(Errc::InvalidArgument, "nonfinite LP data");
    }
  }
  if (opts.exact) return Simplex<Rational>(model).run();
  return Simplex<double>(model).run();
}

}  // namespace polycrit
