#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "criticality.hpp"

namespace polycrit {

/// Set known only through membership, with optional distance and on-set sampler.
struct SetOracle {
  int dim = 0;
  std::function<bool(const Vec&)> contains;
  /// Euclidean distance to the set; preferred over perturbation sampling when present.
  std::function<double(const Vec&)> distance;
  /// Random point of the set within `radius` of `center`, if one was found.
  std::function<std::optional<Vec>(const Vec& center, double radius, std::mt19937_64&)> sample_near;
};

struct SampleParams {
  int jmin = 4;
  int jmax = 20;
  double delta = 1e-3;
  int samples = 64;
  double base_radius = 1e-2;
  int base_samples = 64;
  std::uint64_t seed = 1;
};

/// Distance-to-set predicate with a relative tolerance.
SetOracle polyhedron_oracle(const Polyhedron& p, double tol = 1e-12);
/// gph dg_1 x ... x gph dg_m, coordinates interleaved as (w_1, y_1, w_2, y_2, ...).
SetOracle graph_oracle(const std::vector<GPiece>& g, double tol = 1e-12);

/// Sampled tangent (T) or limiting tangent (Tsharp) membership of dir at base. Throws BaseNotInSet.
bool sample_tangent(const SetOracle& set, const Vec& base, const Vec& dir, ConeKind kind,
                    const SampleParams& params = {});

struct GridSpec {
  double y_step = 0.01;
  double y_box = 3.0;
  int dx_points = 201;
};

struct GridWitness {
  Vec y;
  Vec dx;
  Vec dy;
  double residual = 0.0;
};

/// Multiplier grid over the multiplier set at x (or the single y when given).
std::vector<Vec> multiplier_grid(const CompositeProblem& p, const Vec& x, const GridSpec& grid);

/// Brute-force search for a critical multiplier; best witness with residual <= tol.
std::optional<GridWitness> grid_critical_search(const CompositeProblem& p, const Vec& x,
                                                const GridSpec& grid = {}, double tol = 1e-6,
                                                DerivKind kind = DerivKind::Graphical,
                                                const std::optional<Vec>& only_y = std::nullopt);

/// Directions of the sup-norm unit sphere on a per-side grid of `points` values.
std::vector<Vec> sup_sphere_grid(int n, int points);

/// Nonnegative least squares min |A z - b|, z >= 0 (Lawson-Hanson).
Vec nnls(const Mat& A, const Vec& b, int max_iter = 0);

/// Max relative error of eval012 gradient and Hessian against central differences.
double fd_check(const Expr& e, const Vec& x, double h = 1e-5);

}  // namespace polycrit
