#include "expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

#include "error.hpp"

namespace polycrit {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log };

struct Expr::Node {
  Op op = Op::Const;
  double c = 0.0;
  int index = 0;     // Var: 0-based variable index
  int exponent = 0;  // Pow
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto node = std::make_shared<Expr::Node>();
  node->op = op;
  node->a = std::move(a);
  node->b = std::move(b);
  return node;
}

NodePtr make_const(double c) {
  auto node = std::make_shared<Expr::Node>();
  node->op = Op::Const;
  node->c = c;
  return node;
}

bool has_variables(const Expr::Node& node) {
  if (node.op == Op::Var) return true;
  if (node.a && has_variables(*node.a)) return true;
  if (node.b && has_variables(*node.b)) return true;
  return false;
}

double eval_value(const Expr::Node& node, const Vec* x);

double eval_pow(double t, int k) {
  if (k < 0 && t == 0.0) fail(Errc::Domain, "negative power of zero");
  return std::pow(t, k);
}

double eval_value(const Expr::Node& node, const Vec* x) {
  switch (node.op) {
    case Op::Const: return node.c;
    case Op::Var: return (*x)(node.index);
    case Op::Neg: return -eval_value(*node.a, x);
    case Op::Add: return eval_value(*node.a, x) + eval_value(*node.b, x);
    case Op::Sub: return eval_value(*node.a, x) - eval_value(*node.b, x);
    case Op::Mul: return eval_value(*node.a, x) * eval_value(*node.b, x);
    case Op::Div: {
      double num = eval_value(*node.a, x);
      double den = eval_value(*node.b, x);
      if (den == 0.0) fail(Errc::Domain, "division by zero");
      return num / den;
    }
    case Op::Pow: return eval_pow(eval_value(*node.a, x), node.exponent);
    case Op::Sin: return std::sin(eval_value(*node.a, x));
    case Op::Cos: return std::cos(eval_value(*node.a, x));
    case Op::Exp: return std::exp(eval_value(*node.a, x));
    case Op::Log: {
      double t = eval_value(*node.a, x);
      if (!(t > 0.0)) fail(Errc::Domain, "log of nonpositive value");
      return std::log(t);
    }
  }
  fail(Errc::Internal, "bad expression node");
}

// Second-order jets. Only the upper triangle is computed; the lower one is a
// copy, so every Hessian is bitwise symmetric.
void mirror(Mat& h) {
  for (int j = 0; j < h.cols(); ++j)
    for (int i = 0; i < j; ++i) h(j, i) = h(i, j);
}

Jet2 constant_jet(double c, int n) {
  return Jet2{c, Vec::Zero(n), Mat::Zero(n, n)};
}

// phi(a) with phi' = d1, phi'' = d2.
Jet2 chain(const Jet2& a, double value, double d1, double d2) {
  const int n = static_cast<int>(a.grad.size());
  Jet2 r{value, d1 * a.grad, Mat::Zero(n, n)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      r.hess(i, j) = d1 * a.hess(i, j) + d2 * (a.grad(i) * a.grad(j));
  mirror(r.hess);
  return r;
}

Jet2 add(const Jet2& a, const Jet2& b, double sign) {
  const int n = static_cast<int>(a.grad.size());
  Jet2 r{a.value + sign * b.value, a.grad + sign * b.grad, Mat::Zero(n, n)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) r.hess(i, j) = a.hess(i, j) + sign * b.hess(i, j);
  mirror(r.hess);
  return r;
}

Jet2 mul(const Jet2& a, const Jet2& b) {
  const int n = static_cast<int>(a.grad.size());
  Jet2 r{a.value * b.value, a.value * b.grad + b.value * a.grad, Mat::Zero(n, n)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      r.hess(i, j) = a.value * b.hess(i, j) + b.value * a.hess(i, j) +
                     (a.grad(i) * b.grad(j) + b.grad(i) * a.grad(j));
  mirror(r.hess);
  return r;
}

Jet2 eval_jet(const Expr::Node& node, const Vec& x) {
  const int n = static_cast<int>(x.size());
  switch (node.op) {
    case Op::Const: return constant_jet(node.c, n);
    case Op::Var: {
      Jet2 r = constant_jet(x(node.index), n);
      r.grad(node.index) = 1.0;
      return r;
    }
    case Op::Neg: {
      Jet2 a = eval_jet(*node.a, x);
      return chain(a, -a.value, -1.0, 0.0);
    }
    case Op::Add: return add(eval_jet(*node.a, x), eval_jet(*node.b, x), 1.0);
    case Op::Sub: return add(eval_jet(*node.a, x), eval_jet(*node.b, x), -1.0);
    case Op::Mul: return mul(eval_jet(*node.a, x), eval_jet(*node.b, x));
    case Op::Div: {
      Jet2 den = eval_jet(*node.b, x);
      const double t = den.value;
      if (t == 0.0) fail(Errc::Domain, "division by zero");
      Jet2 inv = chain(den, 1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t));
      return mul(eval_jet(*node.a, x), inv);
    }
    case Op::Pow: {
      Jet2 a = eval_jet(*node.a, x);
      const int k = node.exponent;
      const double t = a.value;
      if (k == 0) return constant_jet(1.0, n);
      if (k < 0 && t == 0.0) fail(Errc::Domain, "negative power of zero");
      const double d1 = k * std::pow(t, k - 1);
      const double d2 = (k == 1) ? 0.0 : double(k) * double(k - 1) * std::pow(t, k - 2);
      return chain(a, std::pow(t, k), d1, d2);
    }
    case Op::Sin: {
      Jet2 a = eval_jet(*node.a, x);
      return chain(a, std::sin(a.value), std::cos(a.value), -std::sin(a.value));
    }
    case Op::Cos: {
      Jet2 a = eval_jet(*node.a, x);
      return chain(a, std::cos(a.value), -std::sin(a.value), -std::cos(a.value));
    }
    case Op::Exp: {
      Jet2 a = eval_jet(*node.a, x);
      const double e = std::exp(a.value);
      return chain(a, e, e, e);
    }
    case Op::Log: {
      Jet2 a = eval_jet(*node.a, x);
      const double t = a.value;
      if (!(t > 0.0)) fail(Errc::Domain, "log of nonpositive value");
      return chain(a, std::log(t), 1.0 / t, -1.0 / (t * t));
    }
  }
  fail(Errc::Internal, "bad expression node");
}

class Parser {
 public:
  Parser(std::string_view text, int n) : s_(text), n_(n) {}

  NodePtr parse_all() {
    skip();
    if (pos_ >= s_.size()) error("empty expression");
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(Errc::Syntax, msg + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    const size_t at = pos_;
    NodePtr ex = unary();
    if (has_variables(*ex)) {
      fail(Errc::NonIntegerExponent, "exponent at offset " + std::to_string(at) + " is not constant");
    }
    const double k = eval_value(*ex, nullptr);
    if (!std::isfinite(k) || k != std::floor(k) || std::fabs(k) > 1e6) {
      fail(Errc::NonIntegerExponent, "exponent at offset " + std::to_string(at) + " is not an integer");
    }
    auto node = std::make_shared<Expr::Node>();
    node->op = Op::Pow;
    node->a = base;
    node->exponent = static_cast<int>(k);
    return node;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    error(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) error("malformed number");
    pos_ += static_cast<size_t>(ptr - first);
    return make_const(v);
  }

  NodePtr identifier() {
    const size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);
    if (id == "sin" || id == "cos" || id == "exp" || id == "log") {
      if (!accept('(')) error("expected '(' after function name");
      NodePtr arg = expr();
      if (!accept(')')) error("expected ')'");
      Op op = id == "sin" ? Op::Sin : id == "cos" ? Op::Cos : id == "exp" ? Op::Exp : Op::Log;
      return make(op, arg);
    }
    if (id.size() >= 2 && id[0] == 'x') {
      bool digits = true;
      for (size_t i = 1; i < id.size(); ++i)
        digits = digits && std::isdigit(static_cast<unsigned char>(id[i]));
      if (digits) {
        if (id.size() > 10) fail(Errc::UnknownVariable, std::string(id) + " is out of range");
        const long k = std::stol(std::string(id.substr(1)));
        if (k < 1 || k > n_) {
          fail(Errc::UnknownVariable,
               std::string(id) + " is out of range for n = " + std::to_string(n_));
        }
        auto node = std::make_shared<Expr::Node>();
        node->op = Op::Var;
        node->index = static_cast<int>(k - 1);
        return node;
      }
    }
    pos_ = start;
    error("unknown identifier '" + std::string(id) + "'");
  }

  std::string_view s_;
  int n_;
  size_t pos_ = 0;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0 || s[0] == '-') return "(" + s + ")";
  return s;
}

void print(const Expr::Node& node, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    print(*node.a, out);
    out += op;
    print(*node.b, out);
    out += ')';
  };
  auto call = [&](const char* f) {
    out += f;
    out += '(';
    print(*node.a, out);
    out += ')';
  };
  switch (node.op) {
    case Op::Const: out += format_double(node.c); return;
    case Op::Var: out += "x" + std::to_string(node.index + 1); return;
    case Op::Neg:
      out += "(-";
      print(*node.a, out);
      out += ')';
      return;
    case Op::Add: binary(" + "); return;
    case Op::Sub: binary(" - "); return;
    case Op::Mul: binary("*"); return;
    case Op::Div: binary("/"); return;
    case Op::Pow:
      out += '(';
      print(*node.a, out);
      out += "^(" + std::to_string(node.exponent) + "))";
      return;
    case Op::Sin: call("sin"); return;
    case Op::Cos: call("cos"); return;
    case Op::Exp: call("exp"); return;
    case Op::Log: call("log"); return;
  }
}

}  // namespace

Expr Expr::parse(std::string_view text, int n) {
  if (n < 0) fail(Errc::InvalidArgument, "negative variable count");
  Parser parser(text, n);
  return Expr(parser.parse_all(), n);
}

Expr Expr::constant(double c, int n) { return Expr(make_const(c), n); }

double Expr::value(const Vec& x) const {
  if (!root_) fail(Errc::InvalidArgument, "empty expression");
  if (x.size() != n_) fail(Errc::DimensionMismatch, "point has wrong dimension");
  return eval_value(*root_, &x);
}

Jet2 Expr::eval012(const Vec& x) const {
  if (!root_) fail(Errc::InvalidArgument, "empty expression");
  if (x.size() != n_) fail(Errc::DimensionMismatch, "point has wrong dimension");
  return eval_jet(*root_, x);
}

std::string Expr::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

}  // namespace polycrit
