#pragma once

#include <optional>
#include <vector>

#include "problem.hpp"

namespace polycrit {

struct PointPD {
  Vec x;
  Vec y;
};

struct DirectionPD {
  Vec dv;
  Vec du;
  Vec dx;
  Vec dy;
};

struct Residual {
  double grad = 0.0;
  double graph = 0.0;

  double norm() const;
};

constexpr double kStationarityTol = 1e-8;

/// Residual of grad_x L(x,y) = v, y in dg(F(x)+u).
Residual residual(const CompositeProblem& p, const PointPD& pt, const Params& prm);

/// {y : F'(x)^T y = v - grad f0(x), y_i in dg_i(F_i(x)+u_i)}.
struct MultiplierPolytope {
  Mat eq_lhs;  // n x m
  Vec eq_rhs;
  std::vector<Interval> bounds;
  Vec w;  // F(x) + u
  bool empty = true;
  bool bounded = true;
  std::vector<Vec> vertices;
  /// Generators of the recession cone (lineality directions in both signs).
  std::vector<Vec> rays;
  /// Set when m is too large for vertex enumeration; the description is still valid.
  bool vertex_limit = false;

  bool contains(const Vec& y, double tol = 1e-9) const;
};

constexpr int kVertexEnumerationMaxM = 12;

MultiplierPolytope multiplier_polytope(const CompositeProblem& p, const Vec& x, const Params& prm,
                                       const LpOptions& lp = {});

struct CqResult {
  bool holds = true;
  std::optional<Vec> certificate;
};

/// F'(x)^T y = 0, y in horizon subdifferential => y = 0. Throws NotInDomain.
CqResult check_cq(const CompositeProblem& p, const Vec& x, const LpOptions& lp = {});

/// Membership of d in T (or T#) of gph M1 at ((v,u),(x,y)). Throws NotStationary.
bool tangent_gph_M1(const CompositeProblem& p, const PointPD& pt, const Params& prm,
                    const DirectionPD& d, ConeKind kind, double tol = kStationarityTol);

/**
 * Tangent test for gph M at ((v,u),x): some multiplier y and dy complete
 * (dv,du,dx) to a tangent direction of gph M1. Decided by exact LPs over
 * the multiplier strata and branch tuples.
 */
bool tangent_gph_M(const CompositeProblem& p, const Vec& x, const Params& prm, const Vec& dv,
                   const Vec& du, const Vec& dx, ConeKind kind, double tol = kStationarityTol,
                   const LpOptions& lp = {});

/// Tangent test for gph M2 at ((v,u),(x,w)) through the coordinate change w = F(x) + u.
bool tangent_gph_M2(const CompositeProblem& p, const Vec& x, const Params& prm, const Vec& dv,
                    const Vec& du, const Vec& dx, const Vec& dw, ConeKind kind,
                    double tol = kStationarityTol, const LpOptions& lp = {});

/// Graph points (F_i(x)+u_i, y_i) snapped onto the graph; throws NotOnGraph.
std::vector<GraphPoint> graph_points(const CompositeProblem& p, const Vec& w, const Vec& y,
                                     double tol = kStationarityTol);

}  // namespace polycrit
