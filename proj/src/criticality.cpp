#include "criticality.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "error.hpp"
#include "rational.hpp"

namespace polycrit {

const char* proof_path_name(ProofPath path) {
  switch (path) {
    case ProofPath::ExactBranchLp: return "exact-branch-LP";
    case ProofPath::ExactConstantH: return "exact-constant-H";
    case ProofPath::HeuristicSearch: return "heuristic-search";
    case ProofPath::GridOracle: return "grid-oracle";
  }
  return "?";
}

const char* deriv_kind_name(DerivKind kind) {
  return kind == DerivKind::Graphical ? "graphical" : "limiting";
}

const char* target_name(IcTarget target) {
  switch (target) {
    case IcTarget::M1At: return "M1-at";
    case IcTarget::M1Around: return "M1-around";
    case IcTarget::MAt: return "M-at";
    case IcTarget::MAround: return "M-around";
  }
  return "?";
}

const char* answer_name(IcAnswer answer) {
  switch (answer) {
    case IcAnswer::Yes: return "Yes";
    case IcAnswer::No: return "No";
    case IcAnswer::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

std::vector<int> range(int from, int to) {
  std::vector<int> out;
  for (int i = from; i < to; ++i) out.push_back(i);
  return out;
}

void require_multiplier(const CompositeProblem& p, const Vec& x, const Vec& ybar, double tol) {
  check_dims(p, &x, &ybar);
  const Residual r = residual(p, {x, ybar}, Params::zero(p.n, p.m));
  if (r.grad > tol || r.graph > tol) {
    fail(Errc::NotAMultiplier, "y is not a multiplier at x (r_grad = " + std::to_string(r.grad) +
                                   ", r_graph = " + std::to_string(r.graph) + ")");
  }
}

std::vector<ConeUnion> coordinate_cones(const CompositeProblem& p, const Vec& w, const Vec& y,
                                        ConeKind kind, double tol) {
  const auto gps = graph_points(p, w, y, tol);
  std::vector<ConeUnion> cones;
  for (int i = 0; i < p.m; ++i) cones.push_back(tangent_cone_graph(p.g[i], gps[i], kind));
  return cones;
}

// Rows of the branch system in z = (dx, dy): member rows mapped through (B_i dx, dy_i).
void member_rows(const Mat& B, const std::vector<ConeUnion>& cones, const std::vector<int>& tuple,
                 std::vector<Vec>& eq, std::vector<Vec>& in) {
  const int m = static_cast<int>(B.rows()), n = static_cast<int>(B.cols());
  for (int i = 0; i < m; ++i) {
    const PolyhedralCone& c = cones[i].members[tuple[i]];
    auto lift = [&](double r0, double r1) {
      Vec row = Vec::Zero(n + m);
      row.head(n) = r0 * B.row(i).transpose();
      row(n + i) = r1;
      return row;
    };
    for (int r = 0; r < c.eq.rows(); ++r) eq.push_back(lift(c.eq(r, 0), c.eq(r, 1)));
    for (int r = 0; r < c.ineq.rows(); ++r) in.push_back(lift(c.ineq(r, 0), c.ineq(r, 1)));
  }
}

Mat to_mat(const std::vector<Vec>& rows, int cols) {
  Mat out(static_cast<int>(rows.size()), cols);
  for (size_t k = 0; k < rows.size(); ++k) out.row(static_cast<int>(k)) = rows[k].transpose();
  return out;
}

PolyhedralCone branch_cone(const Mat& H, const Mat& B, const std::vector<ConeUnion>& cones,
                           const std::vector<int>& tuple) {
  const int m = static_cast<int>(B.rows()), n = static_cast<int>(B.cols());
  std::vector<Vec> eq, in;
  for (int j = 0; j < n; ++j) {
    Vec row(n + m);
    row.head(n) = H.row(j).transpose();
    row.tail(m) = B.col(j);
    eq.push_back(row);
  }
  member_rows(B, cones, tuple, eq, in);
  return PolyhedralCone(to_mat(eq, n + m), to_mat(in, n + m));
}

/**
 * Direction z = (dx, dy) of the branch system with dx != 0, where the
 * stationarity rows H dx + B^T dy = 0 are relaxed to |.| <= eps.
 */
std::optional<Vec> relaxed_branch_witness(const Mat& H, const Mat& B, const std::vector<ConeUnion>& cones,
                                          const std::vector<int>& tuple, double eps, const LpOptions& lp) {
  const int m = static_cast<int>(B.rows()), n = static_cast<int>(B.cols());
  const int N = n + m;
  std::vector<Vec> eq, in;
  member_rows(B, cones, tuple, eq, in);
  auto base_model = [&](int nv) {
    LpModel model(nv);
    for (int j = 0; j < n; ++j) {
      Vec row = Vec::Zero(nv);
      row.head(n) = H.row(j).transpose();
      row.segment(n, m) = B.col(j);
      model.add_row(row, RowSense::Le, eps);
      model.add_row(row, RowSense::Ge, -eps);
    }
    for (const auto& r : eq) {
      Vec row = Vec::Zero(nv);
      row.head(N) = r;
      model.add_row(row, RowSense::Eq, 0.0);
    }
    for (const auto& r : in) {
      Vec row = Vec::Zero(nv);
      row.head(N) = r;
      model.add_row(row, RowSense::Le, 0.0);
    }
    return model;
  };
  for (int j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      LpModel model = base_model(N);
      for (int k = 0; k < N; ++k) model.set_bounds(k, -1.0, 1.0);
      model.objective(j) = sign;
      const LpSolution s = solve_lp(model, lp);
      if (s.status != LpStatus::Optimal || s.objective < 0.5) continue;
      LpModel q = base_model(2 * N);
      for (int k = 0; k < N; ++k) {
        q.set_bounds(k, -1.0, 1.0);
        q.set_bounds(N + k, 0.0, kInf);
        if (k == j) continue;
        q.objective(N + k) = -1.0;
        Vec row = Vec::Zero(2 * N);
        row(k) = 1.0;
        row(N + k) = -1.0;
        q.add_row(row, RowSense::Le, 0.0);
        row(k) = -1.0;
        q.add_row(row, RowSense::Le, 0.0);
      }
      q.set_bounds(j, sign * s.objective, sign * s.objective);
      const LpSolution t = solve_lp(q, lp);
      Vec z = t.status == LpStatus::Optimal ? Vec(t.x.head(N)) : s.x;
      return Vec(z / z.head(n).cwiseAbs().maxCoeff());
    }
  }
  return std::nullopt;
}

struct Found {
  Vec dx;
  Vec dy;
};

std::optional<Found> critical_direction(const Mat& H, const Mat& B, const std::vector<ConeUnion>& cones,
                                        const LpOptions& lp, size_t cap) {
  const int n = static_cast<int>(B.cols()), m = static_cast<int>(B.rows());
  for (const auto& tuple : branch_tuples(cones, cap)) {
    if (auto z = lp_feasible_nonzero(branch_cone(H, B, cones, tuple), range(0, n), lp)) {
      return Found{z->head(n), z->tail(m)};
    }
  }
  return std::nullopt;
}

bool witness_valid(const CompositeProblem& p, const Vec& x, const Vec& y, const Vec& dx,
                   const Vec& dy, DerivKind kind) {
  try {
    DirectionPD d{Vec::Zero(p.n), Vec::Zero(p.m), dx, dy};
    return dx.cwiseAbs().maxCoeff() >= 0.5 &&
           tangent_gph_M1(p, {x, y}, Params::zero(p.n, p.m), d, cone_kind(kind), 1e-8);
  } catch (const Error&) {
    return false;
  }
}

int numeric_rank(const Mat& a, double rel) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s(0));
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel * scale) ++r;
  return r;
}

Mat null_basis(const Mat& a, int cols) {
  if (a.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-10 * scale) ++r;
  return svd.matrixV().rightCols(cols - r);
}

struct SearchContext {
  const CompositeProblem& p;
  const Vec& x;
  const Evaluation& ev;
  const MultiplierPolytope& poly;
  DerivKind kind;
  const AnalysisOptions& opts;
  Mat B;
};

Mat hess_at(const SearchContext& c, const Vec& y) { return snap_small(lagrangian_hessian(c.ev, y)); }

std::optional<CriticalWitness> accept(const SearchContext& c, const Vec& y, const Vec& dx, const Vec& dy) {
  if (!witness_valid(c.p, c.x, y, dx, dy, c.kind)) return std::nullopt;
  return CriticalWitness{y, dx, dy};
}

// One-dimensional face with y = y0 + t r: the critical t are rank drops of a matrix pencil.
std::optional<CriticalWitness> pencil_search(const SearchContext& c, const MultiplierCell& cell,
                                             const Vec& r, const std::vector<ConeUnion>& cones,
                                             bool& exhaustive) {
  const int n = c.p.n, m = c.p.m, N = n + m;
  double t_lo = -kInf, t_hi = kInf;
  for (int i = 0; i < m; ++i) {
    if (cell.strata[i].point || std::fabs(r(i)) < 1e-14) continue;
    const double lo = (cell.strata[i].lo - cell.interior(i)) / r(i);
    const double hi = (cell.strata[i].hi - cell.interior(i)) / r(i);
    t_lo = std::max(t_lo, std::min(lo, hi));
    t_hi = std::min(t_hi, std::max(lo, hi));
  }
  const Mat H0 = hess_at(c, cell.interior);
  Mat G = Mat::Zero(n, n);
  for (int i = 0; i < m; ++i) G += r(i) * c.ev.hessF[i];
  std::mt19937_64 rng(c.opts.seed);
  std::normal_distribution<double> gauss;
  auto try_t = [&](double t, const std::vector<int>& tuple) -> std::optional<CriticalWitness> {
    if (!(t > t_lo && t < t_hi)) return std::nullopt;
    const Vec y = cell.interior + t * r;
    const Mat H = hess_at(c, y);
    const double eps = 1e-9 * std::max(1.0, H.cwiseAbs().maxCoeff());
    if (auto z = relaxed_branch_witness(H, c.B, cones, tuple, eps, c.opts.lp)) {
      return accept(c, y, z->head(n), z->tail(m));
    }
    return std::nullopt;
  };
  for (const auto& tuple : branch_tuples(cones, c.opts.max_faces)) {
    std::vector<Vec> eq, in;
    member_rows(c.B, cones, tuple, eq, in);
    const int a = static_cast<int>(in.size());
    if (a > 12) fail(Errc::BranchLimitExceeded, "too many inequality rows in a branch");
    for (unsigned mask = 0; mask < (1u << a); ++mask) {
      std::vector<Vec> rows0, rows1;
      for (int j = 0; j < n; ++j) {
        Vec row(N), row1 = Vec::Zero(N);
        row.head(n) = H0.row(j).transpose();
        row.tail(m) = c.B.col(j);
        row1.head(n) = G.row(j).transpose();
        rows0.push_back(row);
        rows1.push_back(row1);
      }
      for (const auto& e : eq) {
        rows0.push_back(e);
        rows1.push_back(Vec::Zero(N));
      }
      for (int k = 0; k < a; ++k) {
        if (mask & (1u << k)) {
          rows0.push_back(in[k]);
          rows1.push_back(Vec::Zero(N));
        }
      }
      const Mat M0 = to_mat(rows0, N), M1 = to_mat(rows1, N);
      const int dD = m - numeric_rank(M0.rightCols(m), 1e-10);
      const int r_star = N - dD;
      int r_g = 0;
      for (double t : {0.318309886, -0.577215665, 1.414213562})
        r_g = std::max(r_g, numeric_rank(M0 + t * M1, 1e-10));
      std::vector<double> candidates;
      if (r_g < r_star) {
        // Degenerate pencil: every t is a rank drop; probe sample points only.
        exhaustive = false;
        const double lo = std::isfinite(t_lo) ? t_lo : -10.0, hi = std::isfinite(t_hi) ? t_hi : 10.0;
        for (int k = 1; k < 10; ++k) candidates.push_back(lo + (hi - lo) * k / 10.0);
      } else if (r_star > 0) {
        Mat U(r_star, M0.rows()), V(N, r_star);
        for (int i = 0; i < U.size(); ++i) U.data()[i] = gauss(rng);
        for (int i = 0; i < V.size(); ++i) V.data()[i] = gauss(rng);
        const Mat A0 = U * M0 * V, A1 = U * M1 * V;
        Eigen::GeneralizedEigenSolver<Mat> ges(A0, A1, false);
        const auto& alphas = ges.alphas();
        const auto& betas = ges.betas();
        for (int k = 0; k < alphas.size(); ++k) {
          if (std::fabs(betas(k)) < 1e-14 * std::max(1.0, std::abs(alphas(k)))) continue;
          const std::complex<double> lam = alphas(k) / betas(k);
          if (std::fabs(lam.imag()) > 1e-7 * (1.0 + std::fabs(lam.real()))) continue;
          const double t = -lam.real();
          const Mat Mt = M0 + t * M1;
          if (numeric_rank(Mt, 1e-8) < r_star) candidates.push_back(t);
        }
      }
      for (double t : candidates) {
        // Round near-integers and simple fractions produced by the eigen solver.
        const double tr = std::round(t * 1e9) / 1e9;
        for (double tt : {tr, t}) {
          if (auto w = try_t(tt, tuple)) return w;
        }
      }
    }
  }
  return std::nullopt;
}

// Multistart alternating minimization for faces of dimension >= 2 with varying H.
std::optional<CriticalWitness> heuristic_search(const SearchContext& c, const MultiplierCell& cell,
                                                const std::vector<ConeUnion>& cones, int cell_index) {
  const int n = c.p.n, m = c.p.m, N = n + m;
  LpOptions fast = c.opts.lp;
  fast.exact = false;
  std::mt19937_64 rng(c.opts.seed + 7919u * static_cast<unsigned>(cell_index));
  std::normal_distribution<double> gauss;
  const auto tuples = branch_tuples(cones, c.opts.max_faces);
  for (int start = 0; start < c.opts.multistarts; ++start) {
    // Start: midpoint between the cell's interior point and a random extreme point of a box slice.
    LpModel sm(m + 1);
    add_cell_rows(sm, cell, c.poly, 0, m);
    sm.objective(m) = 0.0;
    sm.set_bounds(m, 0.0, 1.0);
    for (int i = 0; i < m; ++i) {
      sm.objective(i) = gauss(rng);
      if (!cell.strata[i].point)
        sm.set_bounds(i, cell.interior(i) - 3.0, cell.interior(i) + 3.0);
    }
    const LpSolution s0 = solve_lp(sm, fast);
    Vec y = s0.status == LpStatus::Optimal ? Vec(0.5 * (s0.x.head(m) + cell.interior)) : cell.interior;
    for (int round = 0; round < c.opts.heuristic_rounds; ++round) {
      const Mat H = hess_at(c, y);
      double best = kInf;
      Vec best_z;
      for (const auto& tuple : tuples) {
        std::vector<Vec> eq, in;
        member_rows(c.B, cones, tuple, eq, in);
        for (int j = 0; j < n; ++j) {
          for (double sign : {1.0, -1.0}) {
            // min ||H dx + B^T dy||_1 with dx_j = sign, |dx| <= 1.
            LpModel q(N + n);
            for (int k = 0; k < n; ++k) q.set_bounds(k, -1.0, 1.0);
            q.set_bounds(j, sign, sign);
            for (int k = 0; k < n; ++k) {
              q.set_bounds(N + k, 0.0, kInf);
              q.objective(N + k) = -1.0;
              Vec row = Vec::Zero(N + n);
              row.head(n) = H.row(k).transpose();
              row.segment(n, m) = c.B.col(k);
              row(N + k) = -1.0;
              q.add_row(row, RowSense::Le, 0.0);
              row.head(N) = -row.head(N);
              q.add_row(row, RowSense::Le, 0.0);
            }
            for (const auto& e : eq) {
              Vec row = Vec::Zero(N + n);
              row.head(N) = e;
              q.add_row(row, RowSense::Eq, 0.0);
            }
            for (const auto& e : in) {
              Vec row = Vec::Zero(N + n);
              row.head(N) = e;
              q.add_row(row, RowSense::Le, 0.0);
            }
            const LpSolution s = solve_lp(q, fast);
            if (s.status == LpStatus::Optimal && -s.objective < best) {
              best = -s.objective;
              best_z = s.x.head(N);
            }
          }
        }
      }
      if (best_z.size() == 0) break;
      if (best <= 1e-9) {
        const double eps = 1e-9 * std::max(1.0, H.cwiseAbs().maxCoeff());
        for (const auto& tuple : tuples) {
          if (auto z = relaxed_branch_witness(H, c.B, cones, tuple, eps, c.opts.lp)) {
            if (auto w = accept(c, y, z->head(n), z->tail(m))) return w;
          }
        }
        break;
      }
      // Update y for the fixed direction: min ||grad2 f0 dx + sum y_i grad2 F_i dx + B^T dy||_1.
      const Vec dx = best_z.head(n), dy = best_z.tail(m);
      const Vec base = c.ev.hess_f0 * dx + c.B.transpose() * dy;
      LpModel ym(m + 1 + n);
      add_cell_rows(ym, cell, c.poly, 0, m);
      ym.objective(m) = 0.0;
      ym.set_bounds(m, 1e-9, 1.0);
      for (int k = 0; k < n; ++k) {
        ym.set_bounds(m + 1 + k, 0.0, kInf);
        ym.objective(m + 1 + k) = -1.0;
        Vec row = Vec::Zero(m + 1 + n);
        for (int i = 0; i < m; ++i) row(i) = c.ev.hessF[i].row(k).dot(dx);
        row(m + 1 + k) = -1.0;
        ym.add_row(row, RowSense::Le, -base(k));
        Vec row2 = -row;
        row2(m + 1 + k) = -1.0;
        ym.add_row(row2, RowSense::Le, base(k));
      }
      const LpSolution sy = solve_lp(ym, fast);
      if (sy.status != LpStatus::Optimal) break;
      const Vec y_next = sy.x.head(m);
      if ((y_next - y).cwiseAbs().maxCoeff() < 1e-13) break;
      y = y_next;
    }
  }
  return std::nullopt;
}

}  // namespace

CriticalityVerdict check_noncritical(const CompositeProblem& p, const Vec& x, const Vec& ybar,
                                     DerivKind kind, const AnalysisOptions& opts) {
  require_multiplier(p, x, ybar, opts.stat_tol);
  const Evaluation ev = evaluate(p, x);
  const Mat H = snap_small(lagrangian_hessian(ev, ybar));
  const Mat B = snap_small(ev.jac);
  const auto cones = coordinate_cones(p, ev.Fx, ybar, cone_kind(kind), opts.stat_tol);
  CriticalityVerdict v;
  v.kind = kind;
  v.path = ProofPath::ExactBranchLp;
  if (auto f = critical_direction(H, B, cones, opts.lp, static_cast<size_t>(opts.max_faces))) {
    v.status = CritStatus::Critical;
    v.witness = DirectionPD{Vec::Zero(p.n), Vec::Zero(p.m), f->dx, f->dy};
  } else {
    v.status = CritStatus::Noncritical;
  }
  return v;
}

UniquenessResult check_uniqueness_cond(const CompositeProblem& p, const Vec& x, const Vec& ybar,
                                       DerivKind kind, const AnalysisOptions& opts) {
  require_multiplier(p, x, ybar, opts.stat_tol);
  const Evaluation ev = evaluate(p, x);
  const Mat B = snap_small(ev.jac);
  const auto cones = coordinate_cones(p, ev.Fx, ybar, cone_kind(kind), opts.stat_tol);
  UniquenessResult out;
  if (p.m == 0) return out;
  for (const auto& tuple : branch_tuples(cones, static_cast<size_t>(opts.max_faces))) {
    std::vector<Vec> eq, in;
    for (int j = 0; j < p.n; ++j) eq.push_back(B.col(j));
    for (int i = 0; i < p.m; ++i) {
      const PolyhedralCone& c = cones[i].members[tuple[i]];
      for (int r = 0; r < c.eq.rows(); ++r) {
        Vec row = Vec::Zero(p.m);
        row(i) = c.eq(r, 1);
        eq.push_back(row);
      }
      for (int r = 0; r < c.ineq.rows(); ++r) {
        Vec row = Vec::Zero(p.m);
        row(i) = c.ineq(r, 1);
        in.push_back(row);
      }
    }
    if (auto w = lp_feasible_nonzero(PolyhedralCone(to_mat(eq, p.m), to_mat(in, p.m)), range(0, p.m), opts.lp)) {
      out.holds = false;
      out.witness = *w;
      return out;
    }
  }
  return out;
}

ICVerdict verdict_ic_M1(const CompositeProblem& p, const Vec& x, const Vec& ybar, Mode mode,
                        const AnalysisOptions& opts) {
  require_multiplier(p, x, ybar, opts.stat_tol);
  const DerivKind kind = mode == Mode::At ? DerivKind::Graphical : DerivKind::Limiting;
  const Evaluation ev = evaluate(p, x);
  const Mat H = snap_small(lagrangian_hessian(ev, ybar));
  const Mat B = snap_small(ev.jac);
  const auto cones = coordinate_cones(p, ev.Fx, ybar, cone_kind(kind), opts.stat_tol);
  ICVerdict v;
  v.target = mode == Mode::At ? IcTarget::M1At : IcTarget::M1Around;
  v.path = ProofPath::ExactBranchLp;
  v.answer = IcAnswer::Yes;
  // Levy-Rockafellar: (0,0,dx,dy) tangent to gph M1 forces (dx,dy) = 0.
  for (const auto& tuple : branch_tuples(cones, static_cast<size_t>(opts.max_faces))) {
    if (auto z = lp_feasible_nonzero(branch_cone(H, B, cones, tuple), range(0, p.n + p.m), opts.lp)) {
      const Vec dx = z->head(p.n), dy = z->tail(p.m);
      v.answer = IcAnswer::No;
      v.witness = IcWitness{ybar, dx, dy};
      const bool critical = dx.size() > 0 && dx.cwiseAbs().maxCoeff() > 0.0;
      v.reason = critical ? std::string(deriv_kind_name(kind)) + " criticality direction"
                          : std::string(deriv_kind_name(kind)) + " multiplier uniqueness fails";
      return v;
    }
  }
  return v;
}

CriticalSearch search_critical_multiplier(const CompositeProblem& p, const Vec& x, DerivKind kind,
                                          const AnalysisOptions& opts) {
  check_dims(p, &x, nullptr);
  const MultiplierPolytope poly = multiplier_polytope(p, x, Params::zero(p.n, p.m), opts.lp);
  if (poly.empty) fail(Errc::NotStationary, "x is not stationary: no multiplier exists");
  const Evaluation ev = evaluate(p, x);
  SearchContext c{p, x, ev, poly, kind, opts, snap_small(ev.jac)};
  CriticalSearch out;
  bool all_constant = true;
  const auto cells = multiplier_cells(poly, p.g, opts.lp, opts.max_faces);
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    const MultiplierCell& cell = cells[ci];
    const auto cones = coordinate_cones(p, ev.Fx, cell.interior, cone_kind(kind), opts.stat_tol);
    std::vector<Vec> dir_rows;
    for (int j = 0; j < p.n; ++j) dir_rows.push_back(poly.eq_lhs.row(j).transpose());
    for (int i = 0; i < p.m; ++i) {
      if (!cell.strata[i].point) continue;
      Vec e = Vec::Zero(p.m);
      e(i) = 1.0;
      dir_rows.push_back(e);
    }
    const Mat R = null_basis(to_mat(dir_rows, p.m), p.m);
    bool constant = true;
    double hscale = 1.0;
    for (const auto& h : ev.hessF) hscale = std::max(hscale, h.cwiseAbs().maxCoeff());
    for (int k = 0; k < R.cols() && constant; ++k) {
      Mat G = Mat::Zero(p.n, p.n);
      for (int i = 0; i < p.m; ++i) G += R(i, k) * ev.hessF[i];
      constant = G.cwiseAbs().maxCoeff() <= 1e-12 * hscale;
    }
    if (constant) {
      const Mat H = hess_at(c, cell.interior);
      if (auto f = critical_direction(H, c.B, cones, opts.lp, static_cast<size_t>(opts.max_faces))) {
        if (auto w = accept(c, cell.interior, f->dx, f->dy)) {
          out.witness = w;
          out.path = ProofPath::ExactConstantH;
          return out;
        }
      }
      continue;
    }
    all_constant = false;
    if (R.cols() == 1) {
      if (auto w = pencil_search(c, cell, R.col(0), cones, out.exhaustive)) {
        out.witness = w;
        out.path = ProofPath::ExactBranchLp;
        return out;
      }
      continue;
    }
    out.exhaustive = false;
    if (auto w = heuristic_search(c, cell, cones, static_cast<int>(ci))) {
      out.witness = w;
      out.path = ProofPath::HeuristicSearch;
      return out;
    }
  }
  if (!out.exhaustive) {
    out.path = ProofPath::HeuristicSearch;
  } else {
    out.path = all_constant ? ProofPath::ExactConstantH : ProofPath::ExactBranchLp;
  }
  return out;
}

bool strict_complementarity(const CompositeProblem& p, const Vec& x, const AnalysisOptions& opts) {
  const MultiplierPolytope poly = multiplier_polytope(p, x, Params::zero(p.n, p.m), opts.lp);
  if (poly.empty) return false;
  for (const auto& cell : multiplier_cells(poly, p.g, opts.lp, opts.max_faces)) {
    bool ri = true;
    for (int i = 0; i < p.m; ++i) {
      const Interval iv = poly.bounds[i];
      const bool singleton = iv.lo == iv.hi;
      ri = ri && (singleton || !cell.strata[i].point || p.g[i].kind == PieceKind::L0);
    }
    if (ri) return true;
  }
  return false;
}

ICVerdict verdict_ic_M(const CompositeProblem& p, const Vec& x, Mode mode, const AnalysisOptions& opts) {
  check_dims(p, &x, nullptr);
  const MultiplierPolytope poly = multiplier_polytope(p, x, Params::zero(p.n, p.m), opts.lp);
  if (poly.empty) fail(Errc::NotStationary, "x is not stationary: no multiplier exists");
  ICVerdict v;
  v.target = mode == Mode::At ? IcTarget::MAt : IcTarget::MAround;
  v.assumptions.strict_complementarity = strict_complementarity(p, x, opts);
  if (!p.convex()) {
    v.answer = IcAnswer::Inconclusive;
    v.path = ProofPath::HeuristicSearch;
    v.reason = "nonconvex l0 piece: convexity assumptions unavailable";
    return v;
  }
  const CqResult cq = check_cq(p, x, opts.lp);
  v.assumptions.cq_checked = true;
  v.assumptions.cq_holds = cq.holds;
  v.assumptions.polyhedral_ic_automatic = true;
  const DerivKind kind = mode == Mode::At ? DerivKind::Graphical : DerivKind::Limiting;
  const CriticalSearch s = search_critical_multiplier(p, x, kind, opts);
  v.path = s.path;
  if (s.witness) {
    v.answer = IcAnswer::No;
    v.witness = IcWitness{s.witness->y, s.witness->dx, s.witness->dy};
    v.reason = std::string(mode == Mode::At ? "critical" : "strongly critical") + " multiplier found";
    v.assumptions.necessary_only = true;
    return v;
  }
  if (!s.exhaustive) {
    v.answer = IcAnswer::Inconclusive;
    v.reason = "critical multiplier search was heuristic on some face";
    return v;
  }
  if (!cq.holds) {
    v.answer = IcAnswer::Inconclusive;
    v.reason = "qualification condition fails; only the necessary direction is available";
    v.assumptions.necessary_only = true;
    return v;
  }
  if (mode == Mode::At) {
    v.answer = IcAnswer::Yes;
    v.reason = "every multiplier is noncritical";
    return v;
  }
  // Around: certify through limiting multiplier uniqueness.
  for (const auto& y : poly.vertices) {
    const UniquenessResult u = check_uniqueness_cond(p, x, y, DerivKind::Limiting, opts);
    if (!u.holds) {
      v.answer = IcAnswer::Inconclusive;
      v.reason = "limiting uniqueness condition fails; locally uniform inner calmness* not verified";
      v.notes.push_back("every multiplier is strongly noncritical");
      return v;
    }
  }
  if (poly.vertices.empty()) {
    v.answer = IcAnswer::Inconclusive;
    v.reason = "multiplier set has no vertices";
    return v;
  }
  v.answer = IcAnswer::Yes;
  v.reason = "every multiplier is strongly noncritical and the limiting uniqueness condition holds";
  return v;
}

bool check_aubin_M1(const CompositeProblem& p, const Vec& x, const Vec& ybar, const AnalysisOptions& opts) {
  require_multiplier(p, x, ybar, opts.stat_tol);
  const Evaluation ev = evaluate(p, x);
  const Mat H = snap_small(lagrangian_hessian(ev, ybar));
  const Mat B = snap_small(ev.jac);
  const auto gps = graph_points(p, ev.Fx, ybar, opts.stat_tol);
  std::vector<ConeUnion> normals;
  for (int i = 0; i < p.m; ++i) normals.push_back(limiting_normal_graph(p.g[i], gps[i]));
  const int n = p.n, m = p.m;
  // Unknowns (eta_v, eta_u).
  for (const auto& tuple : branch_tuples(normals, static_cast<size_t>(opts.max_faces))) {
    std::vector<Vec> eq, in;
    for (int j = 0; j < n; ++j) {
      Vec row(n + m);
      row.head(n) = H.row(j).transpose();
      row.tail(m) = -B.col(j);
      eq.push_back(row);
    }
    for (int i = 0; i < m; ++i) {
      const PolyhedralCone& c = normals[i].members[tuple[i]];
      auto lift = [&](double r0, double r1) {
        Vec row = Vec::Zero(n + m);
        row.head(n) = r1 * B.row(i).transpose();
        row(n + i) = r0;
        return row;
      };
      for (int r = 0; r < c.eq.rows(); ++r) eq.push_back(lift(c.eq(r, 0), c.eq(r, 1)));
      for (int r = 0; r < c.ineq.rows(); ++r) in.push_back(lift(c.ineq(r, 0), c.ineq(r, 1)));
    }
    if (lp_feasible_nonzero(PolyhedralCone(to_mat(eq, n + m), to_mat(in, n + m)), range(0, n + m), opts.lp))
      return false;
  }
  return true;
}

}  // namespace polycrit
