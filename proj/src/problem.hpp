#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"
#include "gpiece.hpp"
#include "json.hpp"

namespace polycrit {

using Json = nlohmann::json;

struct NamedPoint {
  Vec x;
  std::optional<Vec> y;
};

/// min f0(x) + g(F(x)) with separable g = sum_i g_i.
struct CompositeProblem {
  int n = 0;
  int m = 0;
  Expr f0;
  std::vector<Expr> F;
  std::vector<GPiece> g;
  std::map<std::string, NamedPoint> points;

  void validate() const;
  bool convex() const;
  bool equality_only() const;
};

/// Perturbation parameters (v, u); zero is the reference pair.
struct Params {
  Vec v;
  Vec u;

  static Params zero(int n, int m) { return {Vec::Zero(n), Vec::Zero(m)}; }
};

/// Derivative data of f0 and F at one point.
struct Evaluation {
  Vec Fx;
  Mat jac;  // m x n
  double f0 = 0.0;
  Vec grad_f0;
  Mat hess_f0;
  std::vector<Mat> hessF;
};

Evaluation evaluate(const CompositeProblem& p, const Vec& x);
Vec lagrangian_gradient(const Evaluation& ev, const Vec& y);
Mat lagrangian_hessian(const Evaluation& ev, const Vec& y);

struct LagrangianDerivs {
  Vec gradx;
  Mat hessxx;
};

LagrangianDerivs lagrangian_xderivs(const CompositeProblem& p, const Vec& x, const Vec& y);

GPiece piece_from_json(const Json& j);
Json piece_to_json(const GPiece& g);
/// Parses a problem document (schema 1); throws Schema on malformed input.
CompositeProblem problem_from_json(const Json& j);
Json problem_to_json(const CompositeProblem& p);
CompositeProblem load_problem(const std::string& path);

void check_dims(const CompositeProblem& p, const Vec* x, const Vec* y);

}  // namespace polycrit
