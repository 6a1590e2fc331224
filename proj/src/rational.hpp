#pragma once

#include <optional>

#include "linalg.hpp"

namespace polycrit {

/// Unique solution of a x = b in exact rational arithmetic, or none when
/// a lacks full column rank or the system is inconsistent.
std::optional<Vec> solve_exact(const Mat& a, const Vec& b);

/// Zeroes entries below tol * max(1, max |entry|).
Mat snap_small(const Mat& a, double tol = 1e-13);
Vec snap_small(const Vec& a, double tol = 1e-13);

}  // namespace polycrit
