#include "gpiece.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace polycrit {

namespace {

struct Staircase {
  std::vector<double> breakpoints;
  std::vector<double> slopes;
};

// Convex kinds other than box as merged breakpoints and slopes.
Staircase staircase(const GPiece& g) {
  Staircase s;
  switch (g.kind) {
    case PieceKind::Free: s.slopes = {0.0}; break;
    case PieceKind::Abs:
      s.breakpoints = {0.0};
      s.slopes = {-g.alpha, g.alpha};
      break;
    case PieceKind::Pwa:
      s.slopes.push_back(g.slopes[0]);
      for (size_t k = 0; k < g.breakpoints.size(); ++k) {
        if (g.slopes[k + 1] == s.slopes.back()) continue;
        s.breakpoints.push_back(g.breakpoints[k]);
        s.slopes.push_back(g.slopes[k + 1]);
      }
      break;
    default: fail(Errc::Internal, "not a staircase kind");
  }
  return s;
}

PolyhedralCone cone2(double e0, double e1, bool with_ineq = false, double a0 = 0, double a1 = 0) {
  Mat e(1, 2);
  e << e0, e1;
  Mat a(with_ineq ? 1 : 0, 2);
  if (with_ineq) a << a0, a1;
  return PolyhedralCone(e, a);
}

PolyhedralCone line_cone(bool vertical) {
  return vertical ? cone2(1, 0) : cone2(0, 1);
}

// Tangent of a single graph piece at a point on it.
PolyhedralCone piece_tangent(const GraphPiece& p, double w, double y) {
  const double s = p.vertical ? y : w;
  const bool at_lo = std::isfinite(p.lo) && std::fabs(s - p.lo) <= kGraphTol;
  const bool at_hi = std::isfinite(p.hi) && std::fabs(s - p.hi) <= kGraphTol;
  if (at_lo && at_hi) return PolyhedralCone::origin(2);
  if (!at_lo && !at_hi) return line_cone(p.vertical);
  const double dir = at_lo ? 1.0 : -1.0;  // allowed sign along the piece
  if (p.vertical) return cone2(1, 0, true, 0, -dir);
  return cone2(0, 1, true, -dir, 0);
}

bool on_piece(const GraphPiece& p, double w, double y, double tol) {
  const double across = p.vertical ? w : y;
  const double along = p.vertical ? y : w;
  return std::fabs(across - p.level) <= tol && along >= p.lo - tol && along <= p.hi + tol;
}

}  // namespace

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

GPiece GPiece::zero() { return GPiece{}; }

GPiece GPiece::nonpos() {
  GPiece g;
  g.kind = PieceKind::Nonpos;
  return g;
}

GPiece GPiece::free() {
  GPiece g;
  g.kind = PieceKind::Free;
  return g;
}

GPiece GPiece::box(double l, double u) {
  GPiece g;
  g.kind = PieceKind::Box;
  g.l = l;
  g.u = u;
  g.validate();
  return g;
}

GPiece GPiece::abs(double alpha) {
  GPiece g;
  g.kind = PieceKind::Abs;
  g.alpha = alpha;
  g.validate();
  return g;
}

GPiece GPiece::pwa(std::vector<double> breakpoints, std::vector<double> slopes) {
  GPiece g;
  g.kind = PieceKind::Pwa;
  g.breakpoints = std::move(breakpoints);
  g.slopes = std::move(slopes);
  g.validate();
  return g;
}

GPiece GPiece::l0(double alpha) {
  GPiece g;
  g.kind = PieceKind::L0;
  g.alpha = alpha;
  g.validate();
  return g;
}

void GPiece::validate() const {
  switch (kind) {
    case PieceKind::Box:
      if (!std::isfinite(l) || !std::isfinite(u) || !(l < u))
        fail(Errc::InvalidArgument, "box requires finite l < u");
      break;
    case PieceKind::Abs:
    case PieceKind::L0:
      if (!std::isfinite(alpha) || !(alpha > 0)) fail(Errc::InvalidArgument, "alpha must be positive");
      break;
    case PieceKind::Pwa:
      if (slopes.size() != breakpoints.size() + 1)
        fail(Errc::InvalidArgument, "pwa needs one more slope than breakpoints");
      for (size_t k = 0; k < slopes.size(); ++k) {
        if (!std::isfinite(slopes[k])) fail(Errc::InvalidArgument, "pwa slopes must be finite");
        if (k > 0 && slopes[k] < slopes[k - 1])
          fail(Errc::InvalidArgument, "pwa slopes must be nondecreasing");
      }
      for (size_t k = 0; k < breakpoints.size(); ++k) {
        if (!std::isfinite(breakpoints[k])) fail(Errc::InvalidArgument, "pwa breakpoints must be finite");
        if (k > 0 && !(breakpoints[k] > breakpoints[k - 1]))
          fail(Errc::InvalidArgument, "pwa breakpoints must be strictly increasing");
      }
      break;
    default: break;
  }
}

std::string GPiece::name() const {
  switch (kind) {
    case PieceKind::Zero: return "zero";
    case PieceKind::Nonpos: return "nonpos";
    case PieceKind::Free: return "free";
    case PieceKind::Box: return "box";
    case PieceKind::Abs: return "abs";
    case PieceKind::Pwa: return "pwa";
    case PieceKind::L0: return "l0";
  }
  return "?";
}

double GPiece::value(double w) const {
  switch (kind) {
    case PieceKind::Zero: return w == 0.0 ? 0.0 : kInf;
    case PieceKind::Nonpos: return w <= 0.0 ? 0.0 : kInf;
    case PieceKind::Free: return 0.0;
    case PieceKind::Box: return (w >= l && w <= u) ? 0.0 : kInf;
    case PieceKind::Abs: return alpha * std::fabs(w);
    case PieceKind::L0: return w == 0.0 ? 0.0 : alpha;
    case PieceKind::Pwa: {
      // g(w) = integral of the slope from 0.
      auto slope_at = [&](double t) {
        size_t k = 0;
        while (k < breakpoints.size() && t > breakpoints[k]) ++k;
        return slopes[k];
      };
      std::vector<double> pts = {0.0, w};
      for (double b : breakpoints)
        if ((b > 0.0 && b < w) || (b < 0.0 && b > w)) pts.push_back(b);
      std::sort(pts.begin(), pts.end());
      double total = 0.0;
      for (size_t k = 0; k + 1 < pts.size(); ++k)
        total += slope_at(0.5 * (pts[k] + pts[k + 1])) * (pts[k + 1] - pts[k]);
      return w >= 0.0 ? total : -total;
    }
  }
  return kInf;
}

Interval subdiff_interval(const GPiece& g, double w, double tol) {
  const Interval empty{1.0, 0.0};
  switch (g.kind) {
    case PieceKind::Zero:
      return std::fabs(w) <= tol ? Interval{-kInf, kInf} : empty;
    case PieceKind::Nonpos:
      if (w > tol) return empty;
      return w >= -tol ? Interval{0.0, kInf} : Interval{0.0, 0.0};
    case PieceKind::Box:
      if (w < g.l - tol || w > g.u + tol) return empty;
      if (std::fabs(w - g.l) <= tol) return {-kInf, 0.0};
      if (std::fabs(w - g.u) <= tol) return {0.0, kInf};
      return {0.0, 0.0};
    case PieceKind::L0:
      return std::fabs(w) <= tol ? Interval{-kInf, kInf} : Interval{0.0, 0.0};
    default: {
      const Staircase s = staircase(g);
      for (size_t k = 0; k < s.breakpoints.size(); ++k) {
        if (std::fabs(w - s.breakpoints[k]) <= tol) return {s.slopes[k], s.slopes[k + 1]};
        if (w < s.breakpoints[k]) return {s.slopes[k], s.slopes[k]};
      }
      return {s.slopes.back(), s.slopes.back()};
    }
  }
}

std::vector<GraphPiece> graph_pieces(const GPiece& g) {
  switch (g.kind) {
    case PieceKind::Zero: return {{true, 0.0, -kInf, kInf}};
    case PieceKind::Nonpos: return {{false, 0.0, -kInf, 0.0}, {true, 0.0, 0.0, kInf}};
    case PieceKind::Box:
      return {{true, g.l, -kInf, 0.0}, {false, 0.0, g.l, g.u}, {true, g.u, 0.0, kInf}};
    case PieceKind::L0: return {{false, 0.0, -kInf, kInf}, {true, 0.0, -kInf, kInf}};
    default: {
      const Staircase s = staircase(g);
      std::vector<GraphPiece> out;
      double left = -kInf;
      for (size_t k = 0; k < s.breakpoints.size(); ++k) {
        out.push_back({false, s.slopes[k], left, s.breakpoints[k]});
        out.push_back({true, s.breakpoints[k], s.slopes[k], s.slopes[k + 1]});
        left = s.breakpoints[k];
      }
      out.push_back({false, s.slopes.back(), left, kInf});
      return out;
    }
  }
}

std::vector<int> pieces_containing(const GPiece& g, double w, double y, double tol) {
  std::vector<int> out;
  const auto pieces = graph_pieces(g);
  for (size_t k = 0; k < pieces.size(); ++k)
    if (on_piece(pieces[k], w, y, tol)) out.push_back(static_cast<int>(k));
  return out;
}

GraphPoint graph_point(const GPiece& g, double w, double y, double tol) {
  const auto idx = pieces_containing(g, w, y, tol);
  if (idx.empty()) {
    fail(Errc::NotOnGraph, "(" + std::to_string(w) + ", " + std::to_string(y) + ") is not on gph d" +
                               g.name());
  }
  return GraphPoint{w, y, idx.front()};
}

ConeUnion tangent_cone_graph(const GPiece& g, const GraphPoint& pt, ConeKind kind) {
  const auto idx = pieces_containing(g, pt.w, pt.y);
  if (idx.empty()) fail(Errc::NotOnGraph, "point is not on the graph");
  const auto pieces = graph_pieces(g);
  ConeUnion out(2);
  for (int k : idx) {
    if (kind == ConeKind::T) {
      out.add(piece_tangent(pieces[k], pt.w, pt.y));
    } else {
      out.add(line_cone(pieces[k].vertical));
    }
  }
  return out;
}

ConeUnion limiting_normal_graph(const GPiece& g, const GraphPoint& pt) {
  const auto idx = pieces_containing(g, pt.w, pt.y);
  if (idx.empty()) fail(Errc::NotOnGraph, "point is not on the graph");
  const auto pieces = graph_pieces(g);
  ConeUnion out(2);
  // Regular normals at nearby points in the relative interior of each piece.
  for (int k : idx) out.add(line_cone(!pieces[k].vertical));
  // Regular normal cone at the point itself.
  PolyhedralCone regular = PolyhedralCone::whole(2);
  for (const auto& m : tangent_cone_graph(g, pt, ConeKind::T).members) regular = regular & polar(m);
  out.add(regular);
  return out;
}

std::pair<GraphPoint, double> project_graph(const GPiece& g, double w, double y) {
  const auto pieces = graph_pieces(g);
  GraphPoint best;
  double best_dist = kInf;
  for (size_t k = 0; k < pieces.size(); ++k) {
    const auto& p = pieces[k];
    double pw, py;
    if (p.vertical) {
      pw = p.level;
      py = std::clamp(y, p.lo, p.hi);
    } else {
      pw = std::clamp(w, p.lo, p.hi);
      py = p.level;
    }
    const double d = std::hypot(w - pw, y - py);
    if (k == 0 || d < best_dist - 1e-15 * (1.0 + best_dist)) {
      best_dist = d;
      best = GraphPoint{pw, py, static_cast<int>(k)};
    }
  }
  return {best, best_dist};
}

ConeUnion paratingent_cone_graph(const GPiece& g, const GraphPoint& pt) {
  if (pieces_containing(g, pt.w, pt.y).empty()) fail(Errc::NotOnGraph, "point is not on the graph");
  if (g.kind == PieceKind::Zero) return ConeUnion(2, {line_cone(true)});
  if (g.kind == PieceKind::Free) return ConeUnion(2, {line_cone(false)});
  fail(Errc::Unsupported, "paratingent cone is only available for subspace graphs");
}

Interval horizon_subdiff(const GPiece& g, double w, double tol) {
  const Interval zero{0.0, 0.0};
  switch (g.kind) {
    case PieceKind::Zero:
      if (std::fabs(w) > tol) break;
      return {-kInf, kInf};
    case PieceKind::Nonpos:
      if (w > tol) break;
      return w >= -tol ? Interval{0.0, kInf} : zero;
    case PieceKind::Box:
      if (w < g.l - tol || w > g.u + tol) break;
      if (std::fabs(w - g.l) <= tol) return {-kInf, 0.0};
      if (std::fabs(w - g.u) <= tol) return {0.0, kInf};
      return zero;
    case PieceKind::L0:
      return std::fabs(w) <= tol ? Interval{-kInf, kInf} : zero;
    default: return zero;
  }
  fail(Errc::NotInDomain, "w = " + std::to_string(w) + " is outside dom " + g.name());
}

std::vector<Stratum> multiplier_strata(const GPiece& g, double w, double tol) {
  const Interval iv = subdiff_interval(g, w, tol);
  if (iv.empty()) fail(Errc::NotInDomain, "w = " + std::to_string(w) + " is outside dom " + g.name());
  if (g.kind == PieceKind::L0 && std::fabs(w) <= tol) {
    return {{-kInf, 0.0, false}, {0.0, 0.0, true}, {0.0, kInf, false}};
  }
  if (iv.lo == iv.hi) return {{iv.lo, iv.lo, true}};
  std::vector<Stratum> out;
  if (std::isfinite(iv.lo)) out.push_back({iv.lo, iv.lo, true});
  out.push_back({iv.lo, iv.hi, false});
  if (std::isfinite(iv.hi)) out.push_back({iv.hi, iv.hi, true});
  return out;
}

}  // namespace polycrit
