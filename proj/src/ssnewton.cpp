#include "ssnewton.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace polycrit {

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "Solved";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::SingularSystem: return "SingularSystem";
    case SolveStatus::Diverged: return "Diverged";
  }
  return "?";
}

double SolverOptions::C(int dim) const { return std::sqrt(dim * (1.0 + kappa * kappa)); }

void SolverOptions::validate() const {
  if (!(tol > 0)) fail(Errc::InvalidArgument, "tol must be positive");
  if (max_iter < 0) fail(Errc::InvalidArgument, "max_iter must be nonnegative");
  if (!(beta >= 1.0)) fail(Errc::InvalidArgument, "beta must be at least 1");
  if (!(kappa >= 0.0)) fail(Errc::InvalidArgument, "kappa must be nonnegative");
}

double IterRecord::rho() const { return std::hypot(r_grad, r_graph); }

std::vector<double> SolveTrace::ratios() const {
  std::vector<double> out;
  for (size_t k = 0; k + 1 < iters.size(); ++k) out.push_back(iters[k + 1].rho() / iters[k].rho());
  return out;
}

std::vector<double> SolveTrace::step_ratios() const {
  std::vector<double> out;
  for (size_t k = 0; k + 1 < iters.size(); ++k) {
    if (iters[k + 1].step_norm == 0.0) break;
    out.push_back(iters[k + 1].step_norm / iters[k].step_norm);
  }
  return out;
}

double SolveTrace::order_estimate() const {
  double est = std::nan("");
  for (size_t k = 1; k + 1 < iters.size(); ++k) {
    const double a = iters[k - 1].rho(), b = iters[k].rho(), c = iters[k + 1].rho();
    if (a > 0 && b > 0 && c > 0 && a != b) {
      const double q = std::log(c / b) / std::log(b / a);
      if (std::isfinite(q)) est = q;
    }
  }
  return est;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string SolveTrace::to_csv() const {
  std::ostringstream os;
  const int n = iters.empty() ? 0 : static_cast<int>(iters[0].x.size());
  const int m = iters.empty() ? 0 : static_cast<int>(iters[0].y.size());
  os << "iter";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  for (int i = 1; i <= m; ++i) os << ",y" << i;
  os << ",r_grad,r_graph,shift,branch,step_norm,diag_value\n";
  for (const auto& r : iters) {
    os << r.iter;
    for (int i = 0; i < n; ++i) os << ',' << fmt(r.x(i));
    for (int i = 0; i < m; ++i) os << ',' << fmt(r.y(i));
    os << ',' << fmt(r.r_grad) << ',' << fmt(r.r_graph) << ',' << fmt(r.shift) << ',' << r.branch << ','
       << fmt(r.step_norm) << ',' << fmt(r.diag_value) << '\n';
  }
  return os.str();
}

ApproxPoint approx_step(const CompositeProblem& p, const Vec& x, const Vec& y) {
  check_dims(p, &x, &y);
  const Evaluation ev = evaluate(p, x);
  ApproxPoint ap;
  ap.x = x;
  ap.y = Vec(p.m);
  ap.u = Vec(p.m);
  for (int i = 0; i < p.m; ++i) {
    const auto [gp, dist] = project_graph(p.g[i], ev.Fx(i), y(i));
    const GraphPiece piece = graph_pieces(p.g[i])[gp.piece];
    ap.y(i) = gp.y;
    ap.u(i) = gp.w - ev.Fx(i);
    ap.branch.piece.push_back(gp.piece);
    ap.branch.p.push_back(piece.vertical ? 0.0 : 1.0);
    ap.branch.q.push_back(piece.vertical ? 1.0 : 0.0);
  }
  ap.v = lagrangian_gradient(ev, ap.y);
  ap.shift = std::sqrt((ap.y - y).squaredNorm() + ap.v.squaredNorm() + ap.u.squaredNorm());
  return ap;
}

NewtonSystem assemble_newton_system(const CompositeProblem& p, const ApproxPoint& ap) {
  const Evaluation ev = evaluate(p, ap.x);
  const int n = p.n, m = p.m;
  NewtonSystem s;
  s.A = Mat::Zero(n + m, n + m);
  s.rhs = Vec::Zero(n + m);
  s.B = Mat::Zero(n + m, n + m);
  s.A.topLeftCorner(n, n) = lagrangian_hessian(ev, ap.y);
  s.A.topRightCorner(n, m) = ev.jac.transpose();
  s.rhs.head(n) = -ap.v;
  s.B.topLeftCorner(n, n) = Mat::Identity(n, n);
  for (int i = 0; i < m; ++i) {
    const double pi = ap.branch.p[i], qi = ap.branch.q[i];
    if (pi == 0.0 && qi == 0.0) fail(Errc::Internal, "degenerate branch direction");
    for (int j = 0; j < n; ++j) s.A(n + i, j) = qi * ev.jac(i, j);
    s.A(n + i, n + i) = -pi;
    s.rhs(n + i) = qi * ap.u(i);
    s.B(n + i, n + i) = -qi;
  }
  return s;
}

std::optional<Vec> solve_newton_linear(const Mat& A, const Vec& rhs) {
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible()) return std::nullopt;
  Vec z = lu.solve(rhs);
  if (!z.allFinite()) return std::nullopt;
  return z;
}

Diagnostic regularity_diagnostic(const Mat& A, const Mat& B, double kappa) {
  if (A.rows() != A.cols()) fail(Errc::DimensionMismatch, "A must be square");
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  const double smin = s.size() ? s(s.size() - 1) : 1.0;
  if (s.size() && !(smin > 1e-14 * std::max(1.0, s(0)))) fail(Errc::SingularSystem, "A is singular");
  const double frob = std::sqrt(A.squaredNorm() + B.squaredNorm());
  Diagnostic d;
  d.value = (s.size() ? 1.0 / smin : 0.0) * frob;
  d.within_bound = d.value <= std::sqrt(static_cast<double>(A.rows()) * (1.0 + kappa * kappa));
  return d;
}

namespace {

std::string branch_string(const std::vector<int>& pieces) {
  std::string s;
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (i) s += '|';
    s += std::to_string(pieces[i]);
  }
  return s.empty() ? "-" : s;
}

// Alternative branch selections at corner coordinates, in mixed-radix order.
std::vector<BranchSelection> alternatives(const CompositeProblem& p, const Vec& x, const ApproxPoint& ap,
                                          int limit) {
  const Evaluation ev = evaluate(p, x);
  std::vector<std::vector<int>> options(p.m);
  for (int i = 0; i < p.m; ++i) {
    options[i] = pieces_containing(p.g[i], ev.Fx(i) + ap.u(i), ap.y(i), 1e-12);
    if (options[i].empty()) options[i] = {ap.branch.piece[i]};
  }
  std::vector<BranchSelection> out;
  std::vector<size_t> pick(p.m, 0);
  while (static_cast<int>(out.size()) < limit) {
    int i = 0;
    while (i < p.m && ++pick[i] == options[i].size()) pick[i++] = 0;
    if (i == p.m) break;
    BranchSelection b;
    for (int k = 0; k < p.m; ++k) {
      const int idx = options[k][pick[k]];
      const bool vertical = graph_pieces(p.g[k])[idx].vertical;
      b.piece.push_back(idx);
      b.p.push_back(vertical ? 0.0 : 1.0);
      b.q.push_back(vertical ? 1.0 : 0.0);
    }
    if (b.piece != ap.branch.piece) out.push_back(b);
  }
  return out;
}

IterRecord record(int k, const Vec& x, const Vec& y, const Residual& r) {
  IterRecord rec;
  rec.iter = k;
  rec.x = x;
  rec.y = y;
  rec.r_grad = r.grad;
  rec.r_graph = r.graph;
  rec.diag_value = std::nan("");
  return rec;
}

void fill_diagnostic(IterRecord& rec, const Mat& A, const Mat& B, const SolverOptions& opts, int dim) {
  try {
    rec.diag_value = regularity_diagnostic(A, B, opts.kappa).value;
    rec.diag_within = rec.diag_value <= opts.C(dim);
  } catch (const Error& e) {
    if (e.code() != Errc::SingularSystem) throw;
    rec.diag_value = std::numeric_limits<double>::infinity();
    rec.diag_within = false;
  }
}

}  // namespace

SolveTrace solve_ge(const CompositeProblem& p, const Vec& x0, const Vec& y0, const SolverOptions& opts) {
  opts.validate();
  check_dims(p, &x0, &y0);
  SolveTrace trace;
  trace.method = "ssn";
  Vec x = x0, y = y0;
  const Params zero = Params::zero(p.n, p.m);
  for (int k = 0;; ++k) {
    Residual r;
    try {
      r = residual(p, {x, y}, zero);
    } catch (const Error& e) {
      if (e.code() != Errc::Domain) throw;
      trace.status = SolveStatus::Diverged;
      trace.message = e.what();
      return trace;
    }
    IterRecord rec = record(k, x, y, r);
    const double rho = rec.rho();
    if (!std::isfinite(rho) || rho > opts.divergence) {
      trace.iters.push_back(rec);
      trace.status = SolveStatus::Diverged;
      trace.message = "residual exceeded the divergence threshold";
      return trace;
    }
    ApproxPoint ap = approx_step(p, x, y);
    rec.shift = ap.shift;
    rec.branch = branch_string(ap.branch.piece);
    if (rho <= opts.tol) {
      trace.iters.push_back(rec);
      trace.status = SolveStatus::Solved;
      return trace;
    }
    if (k >= opts.max_iter) {
      trace.iters.push_back(rec);
      trace.status = SolveStatus::MaxIter;
      return trace;
    }
    NewtonSystem sys = assemble_newton_system(p, ap);
    std::optional<Vec> step = solve_newton_linear(sys.A, sys.rhs);
    if (!step) {
      for (const auto& b : alternatives(p, x, ap, opts.branch_retries)) {
        ap.branch = b;
        sys = assemble_newton_system(p, ap);
        step = solve_newton_linear(sys.A, sys.rhs);
        if (step) {
          rec.branch = branch_string(b.piece);
          break;
        }
      }
    }
    if (!step) {
      trace.iters.push_back(rec);
      trace.status = SolveStatus::SingularSystem;
      trace.message = "Newton system singular on every admissible branch";
      return trace;
    }
    rec.step_norm = step->norm();
    fill_diagnostic(rec, sys.A, sys.B, opts, p.n + p.m);
    trace.iters.push_back(rec);
    ++trace.newton_steps;
    x = ap.x + step->head(p.n);
    y = ap.y + step->tail(p.m);
  }
}

SolveTrace newton_kkt(const CompositeProblem& p, const Vec& x0, const Vec& y0, const SolverOptions& opts) {
  if (!p.equality_only()) fail(Errc::NotEqualityOnly, "newton_kkt requires every g piece to be zero");
  opts.validate();
  check_dims(p, &x0, &y0);
  SolveTrace trace;
  trace.method = "newton";
  Vec x = x0, y = y0;
  const int n = p.n, m = p.m;
  for (int k = 0;; ++k) {
    Evaluation ev;
    try {
      ev = evaluate(p, x);
    } catch (const Error& e) {
      if (e.code() != Errc::Domain) throw;
      trace.status = SolveStatus::Diverged;
      trace.message = e.what();
      return trace;
    }
    const Vec grad = lagrangian_gradient(ev, y);
    Residual r;
    r.grad = grad.norm();
    r.graph = ev.Fx.norm();
    IterRecord rec = record(k, x, y, r);
    rec.shift = std::sqrt(grad.squaredNorm() + ev.Fx.squaredNorm());
    rec.branch = std::string(m == 0 ? "-" : "");
    for (int i = 0; i < m; ++i) rec.branch += (i ? "|0" : "0");
    const double rho = rec.rho();
    if (!std::isfinite(rho) || rho > opts.divergence) {
      trace.iters.push_back(rec);
      trace.status = SolveStatus::Diverged;
      trace.message = "residual exceeded the divergence threshold";
      return trace;
    }
    if (rho <= opts.tol) {
      trace.iters.push_back(rec);
      trace.status = SolveStatus::Solved;
      return trace;
    }
    if (k >= opts.max_iter) {
      trace.iters.push_back(rec);
      trace.status = SolveStatus::MaxIter;
      return trace;
    }
    Mat J = Mat::Zero(n + m, n + m);
    J.topLeftCorner(n, n) = lagrangian_hessian(ev, y);
    J.topRightCorner(n, m) = ev.jac.transpose();
    J.bottomLeftCorner(m, n) = ev.jac;
    Vec rhs(n + m);
    rhs.head(n) = -grad;
    rhs.tail(m) = -ev.Fx;
    const std::optional<Vec> step = solve_newton_linear(J, rhs);
    if (!step) {
      trace.iters.push_back(rec);
      trace.status = SolveStatus::SingularSystem;
      trace.message = "KKT Jacobian is singular";
      return trace;
    }
    Mat Bd = Mat::Zero(n + m, n + m);
    Bd.topLeftCorner(n, n) = Mat::Identity(n, n);
    Bd.bottomRightCorner(m, m) = -Mat::Identity(m, m);
    rec.step_norm = step->norm();
    fill_diagnostic(rec, J, Bd, opts, n + m);
    trace.iters.push_back(rec);
    ++trace.newton_steps;
    x = x + step->head(n);
    y = y + step->tail(m);
  }
}

}  // namespace polycrit
