#include "rational.hpp"

#include <boost/multiprecision/gmp.hpp>
#include <cmath>
#include <vector>

namespace polycrit {

using Rational = boost::multiprecision::mpq_rational;

std::optional<Vec> solve_exact(const Mat& a, const Vec& b) {
  const int rows = static_cast<int>(a.rows()), cols = static_cast<int>(a.cols());
  std::vector<std::vector<Rational>> t(rows, std::vector<Rational>(cols + 1));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) t[i][j] = Rational(a(i, j));
    t[i][cols] = Rational(b(i));
  }
  std::vector<int> pivot_col;
  int r = 0;
  for (int j = 0; j < cols && r < rows; ++j) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (t[i][j] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;  // rank deficient
    std::swap(t[r], t[piv]);
    for (int i = 0; i < rows; ++i) {
      if (i == r || t[i][j] == 0) continue;
      const Rational f = t[i][j] / t[r][j];
      for (int k = j; k <= cols; ++k) t[i][k] -= f * t[r][k];
    }
    pivot_col.push_back(j);
    ++r;
  }
  if (r < cols) return std::nullopt;
  for (int i = r; i < rows; ++i)
    if (t[i][cols] != 0) return std::nullopt;
  Vec x(cols);
  for (int i = 0; i < cols; ++i) x(pivot_col[i]) = Rational(t[i][cols] / t[i][pivot_col[i]]).convert_to<double>();
  return x;
}

Mat snap_small(const Mat& a, double tol) {
  Mat out = a;
  const double scale = std::max(1.0, a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0);
  for (int i = 0; i < out.size(); ++i)
    if (std::fabs(out.data()[i]) < tol * scale) out.data()[i] = 0.0;
  return out;
}

Vec snap_small(const Vec& a, double tol) {
  return snap_small(Mat(a), tol).col(0);
}

}  // namespace polycrit
