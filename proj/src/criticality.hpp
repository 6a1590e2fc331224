#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cells.hpp"
#include "stationarity.hpp"

namespace polycrit {

/// Graphical derivative (tangent cones) or limiting derivative (T# cones).
enum class DerivKind { Graphical, Limiting };

inline ConeKind cone_kind(DerivKind k) { return k == DerivKind::Graphical ? ConeKind::T : ConeKind::Tsharp; }

enum class ProofPath { ExactBranchLp, ExactConstantH, HeuristicSearch, GridOracle };
enum class CritStatus { Noncritical, Critical, Inconclusive };

struct CriticalityVerdict {
  CritStatus status = CritStatus::Inconclusive;
  DerivKind kind = DerivKind::Graphical;
  ProofPath path = ProofPath::ExactBranchLp;
  std::optional<DirectionPD> witness;
  std::string reason;
};

struct AnalysisOptions {
  LpOptions lp;
  double stat_tol = kStationarityTol;
  int max_faces = kMaxFaces;
  int multistarts = 64;
  int heuristic_rounds = 20;
  std::uint64_t seed = 20240611;
};

/// Noncriticality of ybar (graphical) or strong noncriticality (limiting).
CriticalityVerdict check_noncritical(const CompositeProblem& p, const Vec& x, const Vec& ybar,
                                     DerivKind kind, const AnalysisOptions& opts = {});

struct UniquenessResult {
  bool holds = true;
  std::optional<Vec> witness;
};

/// F'(x)^T dy = 0, (0, dy) in T (or T#) of gph dg => dy = 0.
UniquenessResult check_uniqueness_cond(const CompositeProblem& p, const Vec& x, const Vec& ybar,
                                       DerivKind kind, const AnalysisOptions& opts = {});

enum class Mode { At, Around };
enum class IcTarget { M1At, M1Around, MAt, MAround };
enum class IcAnswer { Yes, No, Inconclusive };

struct IcWitness {
  std::optional<Vec> y;
  std::optional<Vec> dx;
  std::optional<Vec> dy;
  bool operator==(const IcWitness&) const = default;
};

struct Assumptions {
  bool cq_checked = false;
  bool cq_holds = false;
  /// Polyhedral g makes the inner calmness* hypothesis automatic.
  bool polyhedral_ic_automatic = false;
  /// Only the necessary direction was verified.
  bool necessary_only = false;
  /// Reported, never used to upgrade a verdict.
  bool strict_complementarity = false;
  bool operator==(const Assumptions&) const = default;
};

struct ICVerdict {
  IcTarget target = IcTarget::MAt;
  IcAnswer answer = IcAnswer::Inconclusive;
  std::optional<IcWitness> witness;
  ProofPath path = ProofPath::ExactBranchLp;
  std::string reason;
  Assumptions assumptions;
  std::vector<std::string> notes;
  bool operator==(const ICVerdict&) const = default;
};

/// Isolated calmness of M1 at/around ((0,0),(x,ybar)).
ICVerdict verdict_ic_M1(const CompositeProblem& p, const Vec& x, const Vec& ybar, Mode mode,
                        const AnalysisOptions& opts = {});
/// Isolated calmness of M at/around ((0,0),x). Throws NotStationary.
ICVerdict verdict_ic_M(const CompositeProblem& p, const Vec& x, Mode mode,
                       const AnalysisOptions& opts = {});

struct CriticalWitness {
  Vec y;
  Vec dx;
  Vec dy;
};

struct CriticalSearch {
  std::optional<CriticalWitness> witness;
  ProofPath path = ProofPath::ExactConstantH;
  /// False when some face was only searched heuristically.
  bool exhaustive = true;
};

/// Searches the multiplier set for a (strongly) critical multiplier.
CriticalSearch search_critical_multiplier(const CompositeProblem& p, const Vec& x, DerivKind kind,
                                          const AnalysisOptions& opts = {});

/// Mordukhovich criterion for the Aubin property of M1 at ((0,0),(x,ybar)).
bool check_aubin_M1(const CompositeProblem& p, const Vec& x, const Vec& ybar,
                    const AnalysisOptions& opts = {});

/// Some multiplier lies in the relative interior of dg(F(x)).
bool strict_complementarity(const CompositeProblem& p, const Vec& x, const AnalysisOptions& opts = {});

const char* proof_path_name(ProofPath path);
const char* deriv_kind_name(DerivKind kind);
const char* target_name(IcTarget target);
const char* answer_name(IcAnswer answer);

}  // namespace polycrit
