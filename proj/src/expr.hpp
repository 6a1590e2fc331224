#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "linalg.hpp"

namespace polycrit {

/// Value, gradient and Hessian of a scalar function at a point.
struct Jet2 {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

/**
 * Immutable expression over the variables x1..xn.
 *
 * Supports literals, + - * /, integer powers, parentheses and the unary
 * functions sin, cos, exp, log. Derivatives are computed by second-order
 * forward-mode AD.
 */
class Expr {
 public:
  struct Node;

  Expr() = default;

  /// Parses `text` as an expression in `n` variables.
  static Expr parse(std::string_view text, int n);
  static Expr constant(double c, int n);

  int arity() const { return n_; }
  bool valid() const { return root_ != nullptr; }

  double value(const Vec& x) const;
  Jet2 eval012(const Vec& x) const;

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const;

 private:
  Expr(std::shared_ptr<const Node> root, int n) : root_(std::move(root)), n_(n) {}

  std::shared_ptr<const Node> root_;
  int n_ = 0;
};

}  // namespace polycrit
