#include "cone.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace polycrit {

namespace {

Mat stack(const Mat& top, const Mat& bottom, int cols) {
  Mat out(top.rows() + bottom.rows(), cols);
  if (top.rows() > 0) out.topRows(top.rows()) = top;
  if (bottom.rows() > 0) out.bottomRows(bottom.rows()) = bottom;
  return out;
}

Mat rows_of(const std::vector<Vec>& rows, int cols) {
  Mat out(static_cast<int>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<int>(i)) = rows[i].transpose();
  return out;
}

/// Orthonormal basis (columns) of the null space of m, which has `cols` columns.
Mat null_space(const Mat& m, int cols, double tol) {
  if (m.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

Mat normalized_rows(const Mat& m) {
  Mat out = m;
  for (int i = 0; i < out.rows(); ++i) {
    const double s = out.row(i).cwiseAbs().maxCoeff();
    if (s > 0) out.row(i) /= s;
  }
  return out;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i) - 1e-12) return true;
    if (a(i) > b(i) + 1e-12) return false;
  }
  return false;
}

std::vector<Vec> canonical_rows(const Mat& m, bool equality) {
  std::vector<Vec> rows;
  for (int i = 0; i < m.rows(); ++i) {
    Vec r = m.row(i).transpose();
    const double s = r.cwiseAbs().maxCoeff();
    if (!(s > 1e-14)) continue;
    r /= s;
    if (equality) {
      for (int j = 0; j < r.size(); ++j) {
        if (std::fabs(r(j)) > 1e-12) {
          if (r(j) < 0) r = -r;
          break;
        }
      }
    }
    for (int j = 0; j < r.size(); ++j)
      if (std::fabs(r(j)) < 1e-15) r(j) = 0.0;
    rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end(), lex_less);
  std::vector<Vec> out;
  for (auto& r : rows) {
    if (out.empty() || (out.back() - r).cwiseAbs().maxCoeff() > 1e-12) out.push_back(r);
  }
  return out;
}

}  // namespace

PolyhedralCone::PolyhedralCone(Mat e, Mat a) : eq(std::move(e)), ineq(std::move(a)) {
  if (eq.cols() != ineq.cols()) fail(Errc::DimensionMismatch, "cone rows disagree in dimension");
}

PolyhedralCone PolyhedralCone::whole(int dim) { return PolyhedralCone(Mat(0, dim), Mat(0, dim)); }

PolyhedralCone PolyhedralCone::origin(int dim) {
  return PolyhedralCone(Mat::Identity(dim, dim), Mat(0, dim));
}

bool PolyhedralCone::contains(const Vec& d, double tol) const {
  if (d.size() != dim()) fail(Errc::DimensionMismatch, "direction has wrong dimension");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  for (int i = 0; i < eq.rows(); ++i) {
    const double s = std::max(eq.row(i).cwiseAbs().maxCoeff(), 1e-300);
    if (std::fabs(eq.row(i).dot(d)) / s > tol * scale) return false;
  }
  for (int i = 0; i < ineq.rows(); ++i) {
    const double s = std::max(ineq.row(i).cwiseAbs().maxCoeff(), 1e-300);
    if (ineq.row(i).dot(d) / s > tol * scale) return false;
  }
  return true;
}

PolyhedralCone PolyhedralCone::canonical() const {
  const int k = dim();
  return PolyhedralCone(rows_of(canonical_rows(eq, true), k), rows_of(canonical_rows(ineq, false), k));
}

bool PolyhedralCone::same_rows(const PolyhedralCone& other, double tol) const {
  if (dim() != other.dim()) return false;
  const PolyhedralCone a = canonical(), b = other.canonical();
  if (a.eq.rows() != b.eq.rows() || a.ineq.rows() != b.ineq.rows()) return false;
  if (a.eq.rows() > 0 && (a.eq - b.eq).cwiseAbs().maxCoeff() > tol) return false;
  if (a.ineq.rows() > 0 && (a.ineq - b.ineq).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

PolyhedralCone PolyhedralCone::operator&(const PolyhedralCone& other) const {
  if (dim() != other.dim()) fail(Errc::DimensionMismatch, "cone dimensions differ");
  return PolyhedralCone(stack(eq, other.eq, dim()), stack(ineq, other.ineq, dim()));
}

ConeUnion::ConeUnion(int k, std::vector<PolyhedralCone> m) : dim(k) {
  for (const auto& c : m) add(c);
}

bool ConeUnion::contains(const Vec& d, double tol) const {
  if (d.size() != dim) fail(Errc::DimensionMismatch, "direction has wrong dimension");
  for (const auto& c : members)
    if (c.contains(d, tol)) return true;
  return false;
}

void ConeUnion::add(const PolyhedralCone& c) {
  if (c.dim() != dim) fail(Errc::DimensionMismatch, "cone dimension differs from union");
  const PolyhedralCone cc = c.canonical();
  for (const auto& m : members)
    if (m.same_rows(cc)) return;
  members.push_back(cc);
}

ConeGenerators generators(const PolyhedralCone& c, double tol) {
  const int k = c.dim();
  ConeGenerators out;
  const Mat all = normalized_rows(stack(c.eq, c.ineq, k));
  const Mat lin = null_space(all, k, tol);
  for (int j = 0; j < lin.cols(); ++j) out.lineality.push_back(lin.col(j));
  // Pointed part lives in null(E) intersected with the complement of the lineality space.
  const Mat q = null_space(stack(normalized_rows(c.eq), lin.transpose(), k), k, tol);
  const int r = static_cast<int>(q.cols());
  if (r == 0) return out;
  const Mat aq = normalized_rows(c.ineq) * q;
  const int a = static_cast<int>(aq.rows());
  const int pick = r - 1;
  if (pick > a) return out;
  // Count subsets to respect the branch cap.
  double count = 1.0;
  for (int i = 0; i < pick; ++i) count = count * (a - i) / (i + 1);
  if (count > double(1 << 16)) fail(Errc::BranchLimitExceeded, "too many ray candidates");
  std::vector<int> idx(pick);
  for (int i = 0; i < pick; ++i) idx[i] = i;
  std::vector<Vec> rays;
  for (;;) {
    Mat sub(pick, r);
    for (int i = 0; i < pick; ++i) sub.row(i) = aq.row(idx[i]);
    const Mat ns = null_space(sub, r, tol);
    if (ns.cols() == 1) {
      for (double sign : {1.0, -1.0}) {
        const Vec z = sign * ns.col(0);
        if ((aq * z).maxCoeff() <= tol * 10) {
          Vec d = q * z;
          d /= d.cwiseAbs().maxCoeff();
          for (int j = 0; j < d.size(); ++j)
            if (std::fabs(d(j)) < 1e-15) d(j) = 0.0;
          bool dup = false;
          for (const auto& e : rays) dup = dup || (e - d).cwiseAbs().maxCoeff() < 1e-9;
          if (!dup) rays.push_back(d);
        }
      }
    }
    int i = pick - 1;
    while (i >= 0 && idx[i] == a - pick + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < pick; ++j) idx[j] = idx[j - 1] + 1;
  }
  out.rays = std::move(rays);
  return out;
}

PolyhedralCone polar(const PolyhedralCone& c, double tol) {
  const int k = c.dim();
  const ConeGenerators g = generators(c, tol);
  return PolyhedralCone(rows_of(g.lineality, k), rows_of(g.rays, k)).canonical();
}

bool includes(const PolyhedralCone& outer, const PolyhedralCone& inner, double tol) {
  const ConeGenerators g = generators(inner, tol);
  for (const auto& l : g.lineality)
    if (!outer.contains(l, tol * 10) || !outer.contains(-l, tol * 10)) return false;
  for (const auto& r : g.rays)
    if (!outer.contains(r, tol * 10)) return false;
  return true;
}

bool includes(const ConeUnion& outer, const ConeUnion& inner, double tol) {
  for (const auto& m : inner.members) {
    bool found = false;
    for (const auto& o : outer.members) {
      if (includes(o, m, tol)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

PolyhedralCone product(const std::vector<PolyhedralCone>& parts) {
  int k = 0, ne = 0, ni = 0;
  for (const auto& p : parts) {
    k += p.dim();
    ne += static_cast<int>(p.eq.rows());
    ni += static_cast<int>(p.ineq.rows());
  }
  Mat e = Mat::Zero(ne, k), a = Mat::Zero(ni, k);
  int col = 0, re = 0, ri = 0;
  for (const auto& p : parts) {
    const int d = p.dim();
    if (p.eq.rows() > 0) e.block(re, col, p.eq.rows(), d) = p.eq;
    if (p.ineq.rows() > 0) a.block(ri, col, p.ineq.rows(), d) = p.ineq;
    re += static_cast<int>(p.eq.rows());
    ri += static_cast<int>(p.ineq.rows());
    col += d;
  }
  return PolyhedralCone(e, a);
}

ConeUnion product(const std::vector<ConeUnion>& parts) {
  int k = 0;
  double count = 1.0;
  for (const auto& p : parts) {
    k += p.dim;
    count *= static_cast<double>(p.members.size());
  }
  if (count > double(1 << 16)) fail(Errc::BranchLimitExceeded, "too many product branches");
  ConeUnion out(k);
  std::vector<size_t> pick(parts.size(), 0);
  if (count == 0) return out;
  for (;;) {
    std::vector<PolyhedralCone> tuple;
    for (size_t i = 0; i < parts.size(); ++i) tuple.push_back(parts[i].members[pick[i]]);
    out.add(product(tuple));
    size_t i = 0;
    while (i < parts.size() && ++pick[i] == parts[i].members.size()) pick[i++] = 0;
    if (i == parts.size()) break;
  }
  return out;
}

bool Polyhedron::contains(const Vec& x, double tol) const {
  if (x.size() != dim()) fail(Errc::DimensionMismatch, "point has wrong dimension");
  for (int i = 0; i < eq.rows(); ++i)
    if (std::fabs(eq.row(i).dot(x) - eq_rhs(i)) > tol * (1 + std::fabs(eq_rhs(i)))) return false;
  for (int i = 0; i < ineq.rows(); ++i)
    if (ineq.row(i).dot(x) - ineq_rhs(i) > tol * (1 + std::fabs(ineq_rhs(i)))) return false;
  return true;
}

namespace {

std::vector<int> active_rows(const Polyhedron& p, const Vec& x, double tol) {
  if (!p.contains(x, tol)) fail(Errc::NotInSet, "point is not in the polyhedron");
  std::vector<int> act;
  for (int i = 0; i < p.ineq.rows(); ++i)
    if (std::fabs(p.ineq.row(i).dot(x) - p.ineq_rhs(i)) <= tol * (1 + std::fabs(p.ineq_rhs(i))))
      act.push_back(i);
  return act;
}

Mat select_rows(const Mat& m, const std::vector<int>& idx) {
  Mat out(static_cast<int>(idx.size()), m.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<int>(i)) = m.row(idx[i]);
  return out;
}

}  // namespace

PolyhedralCone tangent_polyhedron(const Polyhedron& p, const Vec& x, double tol) {
  const int k = static_cast<int>(x.size());
  const std::vector<int> act = active_rows(p, x, tol);
  Mat e = p.eq.rows() > 0 ? p.eq : Mat(0, k);
  return PolyhedralCone(e, select_rows(p.ineq, act)).canonical();
}

ConeUnion limiting_tangent_polyhedron(const Polyhedron& p, const Vec& x, double tol,
                                      const LpOptions& lp) {
  const int k = static_cast<int>(x.size());
  const std::vector<int> act = active_rows(p, x, tol);
  const int a = static_cast<int>(act.size());
  if (a > 16) fail(Errc::BranchLimitExceeded, "more than 16 active rows");
  Mat e = p.eq.rows() > 0 ? p.eq : Mat(0, k);
  ConeUnion out(k);
  for (unsigned mask = 0; mask < (1u << a); ++mask) {
    // Face: rows in mask tight, other active rows strictly slack.
    LpModel m(k + 1);
    m.objective(k) = 1.0;
    m.set_bounds(k, -kInf, 1.0);
    for (int i = 0; i < e.rows(); ++i) {
      Vec r = Vec::Zero(k + 1);
      r.head(k) = e.row(i).transpose();
      m.add_row(r, RowSense::Eq, p.eq_rhs(i));
    }
    std::vector<int> tight;
    for (int i = 0; i < p.ineq.rows(); ++i) {
      Vec r = Vec::Zero(k + 1);
      r.head(k) = p.ineq.row(i).transpose();
      auto it = std::find(act.begin(), act.end(), i);
      if (it == act.end()) {
        m.add_row(r, RowSense::Le, p.ineq_rhs(i));
      } else if (mask & (1u << (it - act.begin()))) {
        m.add_row(r, RowSense::Eq, p.ineq_rhs(i));
        tight.push_back(i);
      } else {
        r(k) = 1.0;
        m.add_row(r, RowSense::Le, p.ineq_rhs(i));
      }
    }
    const LpSolution s = solve_lp(m, lp);
    if (s.status != LpStatus::Optimal || !(s.objective > 0)) continue;
    out.add(PolyhedralCone(e, select_rows(p.ineq, tight)));
  }
  return out;
}

std::optional<Vec> lp_feasible_nonzero(const PolyhedralCone& c, const std::vector<int>& coords,
                                       const LpOptions& lp) {
  const int k = c.dim();
  for (int j : coords)
    if (j < 0 || j >= k) fail(Errc::InvalidArgument, "coordinate index out of range");
  for (int j : coords) {
    for (double sign : {1.0, -1.0}) {
      LpModel m(k);
      for (int i = 0; i < k; ++i) m.set_bounds(i, -1.0, 1.0);
      m.objective(j) = sign;
      for (int i = 0; i < c.eq.rows(); ++i) m.add_row(c.eq.row(i).transpose(), RowSense::Eq, 0.0);
      for (int i = 0; i < c.ineq.rows(); ++i)
        m.add_row(c.ineq.row(i).transpose(), RowSense::Le, 0.0);
      const LpSolution s = solve_lp(m, lp);
      if (s.status != LpStatus::Optimal || !(s.objective > lp.tol)) continue;
      // Polish: d_j = sign, minimize the l1 norm of the remaining entries.
      LpModel q(2 * k);
      q.set_bounds(j, sign, sign);
      for (int i = 0; i < k; ++i) {
        q.set_bounds(k + i, 0.0, kInf);
        if (i == j) continue;
        q.objective(k + i) = -1.0;
        Vec r = Vec::Zero(2 * k);
        r(i) = 1.0;
        r(k + i) = -1.0;
        q.add_row(r, RowSense::Le, 0.0);
        r(i) = -1.0;
        q.add_row(r, RowSense::Le, 0.0);
      }
      for (int i = 0; i < c.eq.rows(); ++i) {
        Vec r = Vec::Zero(2 * k);
        r.head(k) = c.eq.row(i).transpose();
        q.add_row(r, RowSense::Eq, 0.0);
      }
      for (int i = 0; i < c.ineq.rows(); ++i) {
        Vec r = Vec::Zero(2 * k);
        r.head(k) = c.ineq.row(i).transpose();
        q.add_row(r, RowSense::Le, 0.0);
      }
      const LpSolution t = solve_lp(q, lp);
      Vec d = t.status == LpStatus::Optimal ? Vec(t.x.head(k)) : Vec(s.x / s.objective);
      double sup = 0.0;
      for (int i : coords) sup = std::max(sup, std::fabs(d(i)));
      return Vec(d / sup);
    }
  }
  return std::nullopt;
}

}  // namespace polycrit
