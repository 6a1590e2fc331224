#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cone.hpp"

namespace polycrit {

enum class PieceKind { Zero, Nonpos, Free, Box, Abs, Pwa, L0 };

/// Tangent cone (T) or limiting tangent cone (Tsharp).
enum class ConeKind { T, Tsharp };

/// Closed interval [lo, hi]; empty when lo > hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return lo > hi; }
  bool bounded() const;
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
  bool operator==(const Interval&) const = default;
};

/// One coordinate g_i of a separable g.
struct GPiece {
  PieceKind kind = PieceKind::Zero;
  double l = 0.0;  // box
  double u = 0.0;  // box
  double alpha = 1.0;  // abs, l0
  std::vector<double> breakpoints;  // pwa
  std::vector<double> slopes;  // pwa, size breakpoints + 1

  static GPiece zero();
  static GPiece nonpos();
  static GPiece free();
  static GPiece box(double l, double u);
  static GPiece abs(double alpha);
  static GPiece pwa(std::vector<double> breakpoints, std::vector<double> slopes);
  static GPiece l0(double alpha);

  /// Throws InvalidArgument when parameters violate the kind's requirements.
  void validate() const;
  bool convex() const { return kind != PieceKind::L0; }
  std::string name() const;
  /// g_i(w); +inf outside the domain.
  double value(double w) const;
};

/// Axis-parallel segment, ray or line in the (w, y) plane.
/// Horizontal: y = level, w in [lo, hi]. Vertical: w = level, y in [lo, hi].
struct GraphPiece {
  bool vertical = false;
  double level = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Point of gph dg_i with the index of a graph piece containing it.
struct GraphPoint {
  double w = 0.0;
  double y = 0.0;
  int piece = 0;
};

/// Multiplier stratum: the single value lo (point) or the open interval (lo, hi).
struct Stratum {
  double lo = 0.0;
  double hi = 0.0;
  bool point = true;
};

constexpr double kGraphTol = 1e-10;

Interval subdiff_interval(const GPiece& g, double w, double tol = kGraphTol);

/**
 * Maximal pieces of gph dg_i.
 *
 * Convex kinds list pieces along the monotone graph from left to right:
 * nonpos is [horizontal ray w <= 0, vertical ray y >= 0], box is
 * [vertical ray at l, segment y = 0, vertical ray at u], pwa alternates
 * plateaus and breakpoint segments. l0 is [R x {0}, {0} x R].
 */
std::vector<GraphPiece> graph_pieces(const GPiece& g);
std::vector<int> pieces_containing(const GPiece& g, double w, double y, double tol = kGraphTol);
/// Certifies (w, y) on the graph; throws NotOnGraph.
GraphPoint graph_point(const GPiece& g, double w, double y, double tol = kGraphTol);

ConeUnion tangent_cone_graph(const GPiece& g, const GraphPoint& pt, ConeKind kind);
ConeUnion limiting_normal_graph(const GPiece& g, const GraphPoint& pt);
/// Nearest graph point; ties go to the lowest piece index.
std::pair<GraphPoint, double> project_graph(const GPiece& g, double w, double y);
/// Only for the subspace kinds zero and free; throws Unsupported otherwise.
ConeUnion paratingent_cone_graph(const GPiece& g, const GraphPoint& pt);

/// Horizon subdifferential as an interval cone; throws NotInDomain.
Interval horizon_subdiff(const GPiece& g, double w, double tol = kGraphTol);
/// Strata of the multiplier range at w; throws NotInDomain.
std::vector<Stratum> multiplier_strata(const GPiece& g, double w, double tol = kGraphTol);

}  // namespace polycrit
