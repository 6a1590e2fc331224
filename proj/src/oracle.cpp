#include "oracle.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace polycrit {

namespace {

Vec random_in_ball(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec z(k);
  for (int i = 0; i < k; ++i) z(i) = normal(rng);
  const double nz = z.norm();
  if (nz == 0.0) return Vec::Zero(k);
  return z * (std::pow(unif(rng), 1.0 / k) / nz);
}

bool on_set(const SetOracle& set, const Vec& z) {
  if (set.distance) return set.distance(z) <= 1e-12 * (1.0 + z.norm());
  return set.contains(z);
}

// d in T_C(base) sampled on t = scale 2^-j.
bool sampled_T(const SetOracle& set, const Vec& base, const Vec& dir, double scale, const SampleParams& sp,
               std::mt19937_64& rng) {
  const double radius = sp.delta * std::max(1.0, dir.norm());
  for (int j = sp.jmin; j <= sp.jmax; ++j) {
    const double t = std::ldexp(scale, -j);
    const Vec z = base + t * dir;
    bool hit = false;
    if (set.distance) {
      hit = set.distance(z) <= radius * t;
    } else {
      hit = set.contains(z);
      for (int s = 0; s < sp.samples && !hit; ++s)
        hit = set.contains(base + t * (dir + radius * random_in_ball(dir.size(), rng)));
    }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

SetOracle polyhedron_oracle(const Polyhedron& p, double tol) {
  SetOracle s;
  s.dim = p.dim();
  s.contains = [p, tol](const Vec& z) { return p.contains(z, tol * (1.0 + z.norm())); };
  return s;
}

SetOracle graph_oracle(const std::vector<GPiece>& g, double tol) {
  SetOracle s;
  s.dim = 2 * static_cast<int>(g.size());
  s.distance = [g](const Vec& z) {
    double acc = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
      const double d = project_graph(g[i], z(2 * i), z(2 * i + 1)).second;
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  s.contains = [dist = s.distance, tol](const Vec& z) { return dist(z) <= tol * (1.0 + z.norm()); };
  s.sample_near = [g](const Vec& c, double radius, std::mt19937_64& rng) -> std::optional<Vec> {
    const double rho = radius / std::sqrt(static_cast<double>(std::max<size_t>(1, g.size())));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec out(c.size());
    for (size_t i = 0; i < g.size(); ++i) {
      const double w = c(2 * i), y = c(2 * i + 1);
      struct Seg {
        bool vertical;
        double level, lo, hi;
      };
      std::vector<Seg> segs;
      for (const auto& pc : graph_pieces(g[i])) {
        const double off = pc.vertical ? w - pc.level : y - pc.level;
        const double along = pc.vertical ? y : w;
        if (std::abs(off) > rho) continue;
        const double half = std::sqrt(rho * rho - off * off);
        const double lo = std::max(pc.lo, along - half), hi = std::min(pc.hi, along + half);
        if (lo <= hi) segs.push_back({pc.vertical, pc.level, lo, hi});
      }
      if (segs.empty()) return std::nullopt;
      const Seg& sg = segs[std::min(segs.size() - 1, static_cast<size_t>(unif(rng) * segs.size()))];
      const double a = sg.lo + (sg.hi - sg.lo) * unif(rng);
      out(2 * i) = sg.vertical ? sg.level : a;
      out(2 * i + 1) = sg.vertical ? a : sg.level;
    }
    return out;
  };
  return s;
}

bool sample_tangent(const SetOracle& set, const Vec& base, const Vec& dir, ConeKind kind,
                    const SampleParams& params) {
  if (base.size() != dir.size() || base.size() != set.dim)
    fail(Errc::DimensionMismatch, "base and direction must match the set dimension");
  if (!on_set(set, base)) fail(Errc::NotInSet, "base point is not in the set");
  if (dir.isZero(0.0)) return true;
  std::mt19937_64 rng(params.seed);
  if (sampled_T(set, base, dir, 1.0, params, rng)) return true;
  if (kind == ConeKind::T) return false;
  const int attempts = set.sample_near ? params.base_samples : 50 * params.base_samples;
  int accepted = 0;
  for (int a = 0; a < attempts && accepted < params.base_samples; ++a) {
    std::optional<Vec> x;
    if (set.sample_near) {
      x = set.sample_near(base, params.base_radius, rng);
    } else {
      Vec cand = base + params.base_radius * random_in_ball(base.size(), rng);
      if (set.contains(cand)) x = cand;
    }
    if (!x) continue;
    ++accepted;
    const double r = (*x - base).norm();
    if (r == 0.0) continue;
    if (sampled_T(set, *x, dir, r, params, rng)) return true;
  }
  return false;
}

std::vector<Vec> sup_sphere_grid(int n, int points) {
  if (n < 1 || points < 2) fail(Errc::InvalidArgument, "sphere grid needs n >= 1 and at least 2 points");
  const int den = points - 1;
  std::vector<Vec> out;
  std::vector<int> idx(n, 0);
  while (true) {
    Vec d(n);
    bool face = false;
    for (int i = 0; i < n; ++i) {
      d(i) = static_cast<double>(2 * idx[i] - den) / den;
      face = face || idx[i] == 0 || idx[i] == den;
    }
    if (face) out.push_back(d);
    int i = 0;
    while (i < n && ++idx[i] > den) idx[i++] = 0;
    if (i == n) break;
  }
  return out;
}

std::vector<Vec> multiplier_grid(const CompositeProblem& p, const Vec& x, const GridSpec& grid) {
  const MultiplierPolytope mp = multiplier_polytope(p, x, Params::zero(p.n, p.m));
  if (mp.empty) return {};
  if (p.m == 0) return {Vec(0)};
  Eigen::JacobiSVD<Mat> svd(mp.eq_lhs, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12 * std::max(1.0, s(0))) ++rank;
  const Vec y0 = svd.solve(mp.eq_rhs);
  const Mat N = svd.matrixV().rightCols(p.m - rank);
  const int k = static_cast<int>(N.cols());
  const long inv = std::lround(1.0 / grid.y_step);
  const long half = std::lround(grid.y_box * inv);
  std::vector<Vec> out;
  std::vector<long> idx(k, -half);
  while (true) {
    Vec z(k);
    for (int i = 0; i < k; ++i) z(i) = static_cast<double>(idx[i]) / static_cast<double>(inv);
    Vec y = y0 + N * z;
    for (int i = 0; i < y.size(); ++i)
      if (std::abs(y(i)) < 1e-13) y(i) = 0.0;
    if (mp.contains(y, 1e-9)) out.push_back(y);
    int i = 0;
    while (i < k && ++idx[i] > half) idx[i++] = -half;
    if (i == k) break;
  }
  return out;
}

Vec nnls(const Mat& A, const Vec& b, int max_iter) {
  const int n = static_cast<int>(A.cols());
  if (max_iter <= 0) max_iter = 3 * n + 10;
  Vec z = Vec::Zero(n);
  if (n == 0) return z;
  std::vector<bool> passive(n, false);
  const double tol = 1e-12 * std::max(1.0, A.norm() * std::max(1.0, b.norm()));
  for (int it = 0; it < max_iter; ++it) {
    const Vec w = A.transpose() * (b - A * z);
    int j = -1;
    for (int i = 0; i < n; ++i)
      if (!passive[i] && w(i) > tol && (j < 0 || w(i) > w(j))) j = i;
    if (j < 0) break;
    passive[j] = true;
    while (true) {
      std::vector<int> P;
      for (int i = 0; i < n; ++i)
        if (passive[i]) P.push_back(i);
      Mat Ap(A.rows(), P.size());
      for (size_t c = 0; c < P.size(); ++c) Ap.col(c) = A.col(P[c]);
      const Vec sp = Ap.completeOrthogonalDecomposition().solve(b);
      Vec s = Vec::Zero(n);
      for (size_t c = 0; c < P.size(); ++c) s(P[c]) = sp(c);
      bool feasible = true;
      for (int i : P) feasible = feasible && s(i) > 0.0;
      if (feasible) {
        z = s;
        break;
      }
      double alpha = 1.0;
      for (int i : P)
        if (s(i) <= 0.0) alpha = std::min(alpha, z(i) / (z(i) - s(i)));
      z += alpha * (s - z);
      for (int i : P)
        if (z(i) <= 1e-15) {
          z(i) = 0.0;
          passive[i] = false;
        }
    }
  }
  return z;
}

std::optional<GridWitness> grid_critical_search(const CompositeProblem& p, const Vec& x, const GridSpec& grid,
                                                double tol, DerivKind kind, const std::optional<Vec>& only_y) {
  check_dims(p, &x, nullptr);
  const Evaluation ev = evaluate(p, x);
  const std::vector<Vec> ys = only_y ? std::vector<Vec>{*only_y} : multiplier_grid(p, x, grid);
  const std::vector<Vec> dirs = sup_sphere_grid(p.n, grid.dx_points);
  std::optional<GridWitness> best;
  for (const Vec& y : ys) {
    std::vector<GraphPoint> gps;
    try {
      gps = graph_points(p, ev.Fx, y);
    } catch (const Error& e) {
      if (e.code() != Errc::NotOnGraph) throw;
      continue;
    }
    const Mat H = lagrangian_hessian(ev, y);
    // Generators (dw, dy) of every member cone, lines split into two rays.
    std::vector<std::vector<std::vector<Eigen::Vector2d>>> members(p.m);
    for (int i = 0; i < p.m; ++i) {
      for (const auto& c : tangent_cone_graph(p.g[i], gps[i], cone_kind(kind)).members) {
        const ConeGenerators gen = generators(c);
        std::vector<Eigen::Vector2d> cols;
        for (const auto& l : gen.lineality) {
          cols.push_back(l);
          cols.push_back(-l);
        }
        for (const auto& r : gen.rays) cols.push_back(r);
        members[i].push_back(cols);
      }
    }
    std::vector<size_t> pick(p.m, 0);
    while (true) {
      std::vector<std::pair<int, Eigen::Vector2d>> cols;
      for (int i = 0; i < p.m; ++i)
        for (const auto& c : members[i][pick[i]]) cols.emplace_back(i, c);
      Mat A = Mat::Zero(p.n + p.m, cols.size());
      for (size_t c = 0; c < cols.size(); ++c) {
        const auto& [i, gvec] = cols[c];
        A.block(0, c, p.n, 1) = ev.jac.row(i).transpose() * gvec(1);
        A(p.n + i, c) = gvec(0);
      }
      for (const Vec& dx : dirs) {
        Vec b(p.n + p.m);
        b.head(p.n) = -H * dx;
        b.tail(p.m) = ev.jac * dx;
        const Vec lam = nnls(A, b);
        const double res = (A * lam - b).norm();
        if (res <= tol && (!best || res < best->residual)) {
          Vec dy = Vec::Zero(p.m);
          for (size_t c = 0; c < cols.size(); ++c) dy(cols[c].first) += lam(c) * cols[c].second(1);
          best = GridWitness{y, dx, dy, res};
          if (res < 1e-14) return best;
        }
      }
      int i = 0;
      while (i < p.m && ++pick[i] == members[i].size()) pick[i++] = 0;
      if (i == p.m) break;
    }
  }
  return best;
}

double fd_check(const Expr& e, const Vec& x, double h) {
  if (!(h > 0)) fail(Errc::InvalidArgument, "step must be positive");
  const int n = e.arity();
  if (x.size() != n) fail(Errc::DimensionMismatch, "point dimension does not match the expression arity");
  const Jet2 jet = e.eval012(x);
  double err = 0.0;
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    const double g = (e.value(xp) - e.value(xm)) / (2 * h);
    err = std::max(err, std::abs(jet.grad(j) - g) / std::max(1.0, std::abs(g)));
    const Vec col = (e.eval012(xp).grad - e.eval012(xm).grad) / (2 * h);
    for (int i = 0; i < n; ++i)
      err = std::max(err, std::abs(jet.hess(i, j) - col(i)) / std::max(1.0, std::abs(col(i))));
  }
  return err;
}

}  // namespace polycrit
