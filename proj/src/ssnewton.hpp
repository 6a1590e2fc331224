#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stationarity.hpp"

namespace polycrit {

/// Selected graph piece per coordinate and the direction (p_i, q_i) of its line.
struct BranchSelection {
  std::vector<int> piece;
  std::vector<double> p;
  std::vector<double> q;
};

/// Point of gph M1^{-1} near the current iterate.
struct ApproxPoint {
  Vec x;
  Vec y;
  Vec v;
  Vec u;
  BranchSelection branch;
  double shift = 0.0;
};

struct SolverOptions {
  double tol = 1e-12;
  int max_iter = 50;
  int branch_retries = 8;
  double kappa = 1.0;
  double beta = 1.0;
  double divergence = 1e12;

  double L() const { return beta + 1.0; }
  double C(int dim) const;
  void validate() const;
};

enum class SolveStatus { Solved, MaxIter, SingularSystem, Diverged };

const char* solve_status_name(SolveStatus s);

struct IterRecord {
  int iter = 0;
  Vec x;
  Vec y;
  double r_grad = 0.0;
  double r_graph = 0.0;
  double shift = 0.0;
  std::string branch;
  double step_norm = 0.0;
  double diag_value = 0.0;
  bool diag_within = false;

  double rho() const;
};

struct SolveTrace {
  std::string method;
  SolveStatus status = SolveStatus::MaxIter;
  std::vector<IterRecord> iters;
  int newton_steps = 0;
  std::string message;

  const IterRecord& last() const { return iters.back(); }
  /// rho_{k+1} / rho_k for consecutive records.
  std::vector<double> ratios() const;
  /// |step_{k+1}| / |step_k| for consecutive Newton steps.
  std::vector<double> step_ratios() const;
  /// Last available log(rho_{k+1}/rho_k) / log(rho_k/rho_{k-1}); NaN when undefined.
  double order_estimate() const;
  std::string to_csv() const;
};

ApproxPoint approx_step(const CompositeProblem& p, const Vec& x, const Vec& y);

struct NewtonSystem {
  Mat A;
  Vec rhs;
  Mat B;  // coefficients of (v_hat, u_hat)
};

NewtonSystem assemble_newton_system(const CompositeProblem& p, const ApproxPoint& ap);

struct Diagnostic {
  double value = 0.0;
  bool within_bound = false;
};

/// ||A^{-1}||_2 ||[A|B]||_F against sqrt(dim (1 + kappa^2)); throws SingularSystem.
Diagnostic regularity_diagnostic(const Mat& A, const Mat& B, double kappa);

/// Unique solution of A z = rhs, or none when A is numerically singular.
std::optional<Vec> solve_newton_linear(const Mat& A, const Vec& rhs);

/// Semismooth* Newton iteration for (0,0) in M1^{-1}(x,y).
SolveTrace solve_ge(const CompositeProblem& p, const Vec& x0, const Vec& y0, const SolverOptions& opts = {});

/// Newton's method on (grad_x L, F) for problems whose pieces are all zero.
SolveTrace newton_kkt(const CompositeProblem& p, const Vec& x0, const Vec& y0, const SolverOptions& opts = {});

}  // namespace polycrit
