#pragma once

#include <optional>
#include <vector>

#include "linalg.hpp"
#include "lp.hpp"

namespace polycrit {

/// The cone {d : E d = 0, A d <= 0}.
struct PolyhedralCone {
  Mat eq;
  Mat ineq;

  PolyhedralCone() = default;
  PolyhedralCone(Mat e, Mat a);

  static PolyhedralCone whole(int dim);
  static PolyhedralCone origin(int dim);

  int dim() const { return static_cast<int>(eq.cols()); }
  bool contains(const Vec& d, double tol = 1e-9) const;
  /// Scaled, sign-normalized, sorted and deduplicated rows.
  PolyhedralCone canonical() const;
  bool same_rows(const PolyhedralCone& other, double tol = 1e-12) const;
  /// Intersection (stacked rows).
  PolyhedralCone operator&(const PolyhedralCone& other) const;
};

/// Finite union of polyhedral cones of a common dimension.
struct ConeUnion {
  int dim = 0;
  std::vector<PolyhedralCone> members;

  ConeUnion() = default;
  explicit ConeUnion(int k) : dim(k) {}
  ConeUnion(int k, std::vector<PolyhedralCone> m);

  bool contains(const Vec& d, double tol = 1e-9) const;
  /// Adds `c` unless a member with identical canonical rows exists.
  void add(const PolyhedralCone& c);
};

/// Lineality basis and extreme rays of a polyhedral cone.
struct ConeGenerators {
  std::vector<Vec> lineality;
  std::vector<Vec> rays;
};

ConeGenerators generators(const PolyhedralCone& c, double tol = 1e-9);
PolyhedralCone polar(const PolyhedralCone& c, double tol = 1e-9);
/// True when every generator of `inner` lies in `outer`.
bool includes(const PolyhedralCone& outer, const PolyhedralCone& inner, double tol = 1e-9);
/// True when every generator of every member of `inner` lies in `outer`.
bool includes(const ConeUnion& outer, const ConeUnion& inner, double tol = 1e-9);

/// Cartesian product of cones placed in consecutive coordinate blocks.
PolyhedralCone product(const std::vector<PolyhedralCone>& parts);
/// Product of unions, enumerating all member tuples.
ConeUnion product(const std::vector<ConeUnion>& parts);

/// The polyhedron {x : E x = e, A x <= a}.
struct Polyhedron {
  Mat eq;
  Vec eq_rhs;
  Mat ineq;
  Vec ineq_rhs;

  int dim() const { return static_cast<int>(ineq.cols() > 0 ? ineq.cols() : eq.cols()); }
  bool contains(const Vec& x, double tol = 1e-9) const;
};

PolyhedralCone tangent_polyhedron(const Polyhedron& p, const Vec& x, double tol = 1e-9);
/// Union of tangent cones at one point per face whose closure contains x.
ConeUnion limiting_tangent_polyhedron(const Polyhedron& p, const Vec& x, double tol = 1e-9,
                                      const LpOptions& lp = {});

/**
 * Finds d in c whose subvector on `coords` is nonzero.
 *
 * Runs LPs maximizing +-d_j over c intersected with the unit box. A found
 * direction is polished to have minimal l1 norm off coordinate j and scaled
 * to sup-norm 1 on `coords`.
 */
std::optional<Vec> lp_feasible_nonzero(const PolyhedralCone& c, const std::vector<int>& coords,
                                       const LpOptions& lp = {});

}  // namespace polycrit
