#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "report.hpp"
#include "ssnewton.hpp"

namespace polycrit {

struct SuiteResult {
  std::string name;
  long probes = 0;
  long agree = 0;
  double threshold = 1.0;
  bool passed = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool passed = true;
};

struct VerifyOptions {
  int samples = 2000;
  std::uint64_t seed = 42;
  GridSpec grid;
  double grid_tol = 1e-6;
};

/// Oracle-versus-analytic suites at x: tangent cones, criticality, derivatives.
VerifyReport verify_instance(const CompositeProblem& p, const Vec& x, const std::optional<Vec>& y,
                             const VerifyOptions& opts = {});

struct ExperimentOptions {
  std::optional<std::string> method;
  std::optional<Vec> x;
  std::optional<Vec> y;
  int grid_points = 10;
  int samples = 20;
  double radius = 0.1;
  std::uint64_t seed = 7;
  SolverOptions solver;
};

struct ExperimentResult {
  std::string csv;
  Json summary;
  bool passed = true;
};

/// Named start-point sweeps; throws UnknownExperiment.
ExperimentResult run_experiment(const std::string& name, const CompositeProblem& p, const ExperimentOptions& opts = {});

/// Runs the solver named "ssn" or "newton".
SolveTrace run_solver(const std::string& method, const CompositeProblem& p, const Vec& x0, const Vec& y0,
                      const SolverOptions& opts);

}  // namespace polycrit
