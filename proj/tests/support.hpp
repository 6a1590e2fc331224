#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cone.hpp"
#include "gpiece.hpp"
#include "problem.hpp"

namespace testing {

using polycrit::ConeUnion;
using polycrit::GPiece;
using polycrit::Mat;
using polycrit::PolyhedralCone;
using polycrit::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

inline Mat mat(int rows, int cols, std::initializer_list<double> v) {
  Mat out(rows, cols);
  auto it = v.begin();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = *it++;
  return out;
}

/// Cone {d : E d = 0, A d <= 0} in R^k.
inline PolyhedralCone cone(int k, std::vector<std::vector<double>> eq, std::vector<std::vector<double>> ineq) {
  Mat E(eq.size(), k), A(ineq.size(), k);
  for (size_t r = 0; r < eq.size(); ++r)
    for (int c = 0; c < k; ++c) E(r, c) = eq[r][c];
  for (size_t r = 0; r < ineq.size(); ++r)
    for (int c = 0; c < k; ++c) A(r, c) = ineq[r][c];
  return PolyhedralCone(E, A);
}

inline Vec random_unit(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec d(k);
  do {
    for (int i = 0; i < k; ++i) d(i) = normal(rng);
  } while (d.norm() < 1e-3);
  return d / d.norm();
}

/// Generators of all members, lines split into both directions.
inline std::vector<Vec> union_generators(const ConeUnion& u) {
  std::vector<Vec> out;
  for (const auto& c : u.members) {
    const auto g = polycrit::generators(c);
    for (const auto& l : g.lineality) {
      out.push_back(l);
      out.push_back(-l);
    }
    for (const auto& r : g.rays) out.push_back(r);
  }
  return out;
}

/// Mutual membership on generators plus sampled probes away from the boundary.
inline bool same_set(const ConeUnion& a, const ConeUnion& b, int probes, std::uint64_t seed, double tol = 1e-8) {
  for (const auto& g : union_generators(a))
    if (!b.contains(g, tol)) return false;
  for (const auto& g : union_generators(b))
    if (!a.contains(g, tol)) return false;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < probes; ++k) {
    const Vec d = random_unit(a.dim, rng);
    if (a.contains(d, tol) != b.contains(d, tol)) return false;
  }
  return true;
}

/// Random polynomial in x1..xn with small integer coefficients.
inline std::string random_poly(int n, std::mt19937_64& rng, bool constant_term = true) {
  std::uniform_int_distribution<int> coef(-2, 2), deg(1, 3), var(1, n);
  std::ostringstream os;
  os << (constant_term ? coef(rng) : 0);
  const int terms = 1 + static_cast<int>(rng() % 4);
  for (int t = 0; t < terms; ++t) {
    const int c = coef(rng);
    if (c == 0) continue;
    os << " + (" << c << ")*x" << var(rng) << "^" << deg(rng);
    if (rng() % 2) os << "*x" << var(rng);
  }
  return os.str();
}

/// Random smooth expression over the function catalog, finite on all of R^n.
inline std::string random_catalog_expr(int n, std::mt19937_64& rng) {
  static const char* unary[] = {"sin", "cos", "exp"};
  std::uniform_int_distribution<int> var(1, n), coef(-3, 3), pw(1, 4);
  std::string s = std::to_string(coef(rng));
  const int terms = 2 + static_cast<int>(rng() % 3);
  for (int t = 0; t < terms; ++t) {
    const std::string xi = "x" + std::to_string(var(rng));
    const std::string xj = "x" + std::to_string(var(rng));
    switch (rng() % 6) {
      case 0: s += " + " + std::to_string(coef(rng)) + "*" + xi + "^" + std::to_string(pw(rng)); break;
      case 1: s += " - " + xi + "*" + xj; break;
      case 2: s += " + " + std::string(unary[rng() % 3]) + "(0.5*" + xi + " - " + xj + ")"; break;
      case 3: s += " + log(2 + " + xi + "^2)"; break;
      case 4: s += " + " + xi + "/(1 + " + xj + "^2)"; break;
      default: s += " + (" + xi + " + 1)^" + std::to_string(pw(rng)) + "*" + xj; break;
    }
  }
  return s;
}

inline polycrit::CompositeProblem data_problem(const std::string& name) {
  return polycrit::load_problem(std::string(POLYCRIT_DATA_DIR) + "/" + name);
}

inline polycrit::CompositeProblem make_problem(int n, const std::string& f0, const std::vector<std::string>& F,
                                               const std::vector<GPiece>& g) {
  polycrit::Json j = {{"schema", 1}, {"n", n}, {"m", F.size()}, {"f0", f0}, {"F", F}};
  j["g"] = polycrit::Json::array();
  for (const auto& p : g) j["g"].push_back(polycrit::piece_to_json(p));
  return polycrit::problem_from_json(j);
}

/// Equality-only instance with a strongly convex objective part.
inline polycrit::CompositeProblem random_equality_problem(std::mt19937_64& rng) {
  const int n = 1 + static_cast<int>(rng() % 3);
  const int m = 1 + static_cast<int>(rng() % n);
  std::ostringstream f0;
  f0 << "0";
  for (int j = 1; j <= n; ++j) f0 << " + 0.5*x" << j << "^2";
  f0 << " + " << random_poly(n, rng, false);
  std::vector<std::string> F;
  for (int i = 0; i < m; ++i) F.push_back("x" + std::to_string(1 + i) + " + " + random_poly(n, rng, false));
  return make_problem(n, f0.str(), F, std::vector<GPiece>(m, GPiece::zero()));
}

struct Instance {
  polycrit::CompositeProblem p;
  Vec x;
  Vec y;  // a multiplier at x
};

/**
 * Instance stationary at x = 0 with integer data in {-1, 0, 1}.
 * Each coordinate picks a piece, a value F_i(0) and a multiplier in dg_i(F_i(0));
 * the linear term of f0 is then chosen so that grad_x L(0, y) = 0.
 */
inline Instance random_stationary_instance(std::mt19937_64& rng, int nmax, int mmax) {
  std::uniform_int_distribution<int> tri(-1, 1);
  const int n = 1 + static_cast<int>(rng() % nmax);
  const int m = 1 + static_cast<int>(rng() % mmax);
  std::vector<GPiece> g;
  std::vector<double> c(m), ybar(m);
  for (int i = 0; i < m; ++i) {
    switch (rng() % 5) {
      case 0:
        g.push_back(GPiece::zero());
        c[i] = 0;
        ybar[i] = tri(rng);
        break;
      case 1:
        g.push_back(GPiece::nonpos());
        c[i] = rng() % 3 == 0 ? -1 : 0;
        ybar[i] = c[i] < 0 ? 0 : static_cast<double>(rng() % 2);
        break;
      case 2:
        g.push_back(GPiece::free());
        c[i] = tri(rng);
        ybar[i] = 0;
        break;
      case 3:
        g.push_back(GPiece::box(-1, 1));
        c[i] = tri(rng);
        ybar[i] = c[i] == 0 ? 0 : c[i] * static_cast<double>(rng() % 2);
        break;
      default:
        g.push_back(GPiece::abs(1));
        c[i] = rng() % 3 == 0 ? 1 : 0;
        ybar[i] = c[i] == 1 ? 1 : tri(rng);
        break;
    }
  }
  std::vector<std::vector<int>> a(m, std::vector<int>(n));
  std::vector<std::string> F;
  for (int i = 0; i < m; ++i) {
    std::ostringstream os;
    os << c[i];
    for (int j = 0; j < n; ++j) {
      a[i][j] = tri(rng);
      if (a[i][j]) os << " + (" << a[i][j] << ")*x" << j + 1;
      if (const int q = tri(rng)) os << " + (" << q << ")*x" << j + 1 << "^2";
    }
    F.push_back(os.str());
  }
  std::ostringstream f0;
  f0 << "0";
  for (int j = 0; j < n; ++j) {
    double b = 0;
    for (int i = 0; i < m; ++i) b -= ybar[i] * a[i][j];
    if (b != 0) f0 << " + (" << b << ")*x" << j + 1;
    if (const int q = tri(rng)) f0 << " + (" << 0.5 * q << ")*x" << j + 1 << "^2";
    for (int k = j + 1; k < n; ++k)
      if (const int q = tri(rng)) f0 << " + (" << q << ")*x" << j + 1 << "*x" << k + 1;
  }
  Instance inst{make_problem(n, f0.str(), F, g), Vec::Zero(n), Vec(m)};
  for (int i = 0; i < m; ++i) inst.y(i) = ybar[i];
  return inst;
}

}  // namespace testing
