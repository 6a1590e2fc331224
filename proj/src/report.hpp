#pragma once

#include <optional>
#include <string>
#include <vector>

#include "criticality.hpp"

namespace polycrit {

const char* crit_status_name(CritStatus s);

/// Criticality of one multiplier under both derivative kinds.
struct MultiplierRow {
  Vec y;
  CriticalityVerdict graphical;
  CriticalityVerdict limiting;
  std::optional<UniquenessResult> uniqueness;
};

struct AnalysisReport {
  Vec x;
  std::optional<Vec> y;
  Mode mode = Mode::At;
  bool stationary = false;
  std::optional<Residual> residual;
  CqResult cq;
  bool polytope_bounded = true;
  bool vertex_limit = false;
  std::vector<Vec> vertices;
  std::vector<Vec> rays;
  std::vector<MultiplierRow> multipliers;
  std::optional<CriticalWitness> critical;
  ProofPath critical_path = ProofPath::ExactConstantH;
  bool critical_exhaustive = true;
  bool strict_complementarity = false;
  std::optional<bool> aubin_M1;
  std::vector<ICVerdict> verdicts;

  bool any_inconclusive() const;
};

/// Runs every analysis at x (and y when given). Throws NotStationary when no multiplier exists.
AnalysisReport analyze(const CompositeProblem& p, const Vec& x, const std::optional<Vec>& y, Mode mode,
                       const AnalysisOptions& opts = {});

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);
Json to_json(const CriticalityVerdict& v);
CriticalityVerdict criticality_from_json(const Json& j);
Json to_json(const ICVerdict& v);
ICVerdict ic_verdict_from_json(const Json& j);
Json to_json(const AnalysisReport& r);
AnalysisReport report_from_json(const Json& j);
std::string to_text(const AnalysisReport& r);

bool same_vec(const Vec& a, const Vec& b);
bool operator==(const CriticalityVerdict& a, const CriticalityVerdict& b);
bool operator==(const AnalysisReport& a, const AnalysisReport& b);

}  // namespace polycrit
