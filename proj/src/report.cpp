#include "report.hpp"

#include <cstdio>
#include <sstream>

#include "error.hpp"

namespace polycrit {

const char* crit_status_name(CritStatus s) {
  switch (s) {
    case CritStatus::Noncritical: return "Noncritical";
    case CritStatus::Critical: return "Critical";
    case CritStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

bool AnalysisReport::any_inconclusive() const {
  for (const auto& v : verdicts)
    if (v.answer == IcAnswer::Inconclusive) return true;
  for (const auto& row : multipliers)
    if (row.graphical.status == CritStatus::Inconclusive || row.limiting.status == CritStatus::Inconclusive)
      return true;
  return false;
}

namespace {

CriticalityVerdict guarded_noncritical(const CompositeProblem& p, const Vec& x, const Vec& y, DerivKind kind,
                                       const AnalysisOptions& opts) {
  try {
    return check_noncritical(p, x, y, kind, opts);
  } catch (const Error& e) {
    if (e.code() != Errc::BranchLimitExceeded) throw;
    CriticalityVerdict v;
    v.kind = kind;
    v.status = CritStatus::Inconclusive;
    v.reason = e.what();
    return v;
  }
}

template <class E>
E enum_from(const Json& j, const char* key, std::initializer_list<E> values, const char* (*name)(E)) {
  const std::string s = j.at(key).get<std::string>();
  for (E e : values)
    if (s == name(e)) return e;
  fail(Errc::Schema, std::string("unknown value '") + s + "' for " + key);
}

const char* mode_name(Mode m) { return m == Mode::At ? "at" : "around"; }

ProofPath path_from(const Json& j, const char* key) {
  return enum_from<ProofPath>(j, key,
                              {ProofPath::ExactBranchLp, ProofPath::ExactConstantH, ProofPath::HeuristicSearch,
                               ProofPath::GridOracle},
                              proof_path_name);
}

template <class T, class F>
std::optional<T> opt_from(const Json& j, const char* key, F f) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return f(j[key]);
}

bool same_opt_vec(const std::optional<Vec>& a, const std::optional<Vec>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_vec(*a, *b);
}

bool same_ic(const ICVerdict& a, const ICVerdict& b) {
  if (a.target != b.target || a.answer != b.answer || a.path != b.path || a.reason != b.reason ||
      !(a.assumptions == b.assumptions) || a.notes != b.notes || a.witness.has_value() != b.witness.has_value())
    return false;
  if (!a.witness) return true;
  return same_opt_vec(a.witness->y, b.witness->y) && same_opt_vec(a.witness->dx, b.witness->dx) &&
         same_opt_vec(a.witness->dy, b.witness->dy);
}

std::string fmt_vec(const Vec& v) {
  std::string s = "(";
  char buf[40];
  for (int i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.10g", i ? ", " : "", v(i));
    s += buf;
  }
  return s + ")";
}

}  // namespace

bool same_vec(const Vec& a, const Vec& b) { return a.size() == b.size() && (a.size() == 0 || a == b); }

bool operator==(const CriticalityVerdict& a, const CriticalityVerdict& b) {
  if (a.status != b.status || a.kind != b.kind || a.path != b.path || a.reason != b.reason ||
      a.witness.has_value() != b.witness.has_value())
    return false;
  if (!a.witness) return true;
  return same_vec(a.witness->dv, b.witness->dv) && same_vec(a.witness->du, b.witness->du) &&
         same_vec(a.witness->dx, b.witness->dx) && same_vec(a.witness->dy, b.witness->dy);
}

bool operator==(const AnalysisReport& a, const AnalysisReport& b) {
  auto same_vecs = [](const std::vector<Vec>& u, const std::vector<Vec>& v) {
    if (u.size() != v.size()) return false;
    for (size_t i = 0; i < u.size(); ++i)
      if (!same_vec(u[i], v[i])) return false;
    return true;
  };
  if (!same_vec(a.x, b.x) || !same_opt_vec(a.y, b.y) || a.mode != b.mode || a.stationary != b.stationary ||
      a.cq.holds != b.cq.holds || !same_opt_vec(a.cq.certificate, b.cq.certificate) ||
      a.polytope_bounded != b.polytope_bounded || a.vertex_limit != b.vertex_limit ||
      !same_vecs(a.vertices, b.vertices) || !same_vecs(a.rays, b.rays) ||
      a.critical_path != b.critical_path || a.critical_exhaustive != b.critical_exhaustive ||
      a.strict_complementarity != b.strict_complementarity || a.aubin_M1 != b.aubin_M1 ||
      a.residual.has_value() != b.residual.has_value() || a.critical.has_value() != b.critical.has_value() ||
      a.multipliers.size() != b.multipliers.size() || a.verdicts.size() != b.verdicts.size())
    return false;
  if (a.residual && (a.residual->grad != b.residual->grad || a.residual->graph != b.residual->graph)) return false;
  if (a.critical && !(same_vec(a.critical->y, b.critical->y) && same_vec(a.critical->dx, b.critical->dx) &&
                      same_vec(a.critical->dy, b.critical->dy)))
    return false;
  for (size_t i = 0; i < a.multipliers.size(); ++i) {
    const auto &ra = a.multipliers[i], &rb = b.multipliers[i];
    if (!same_vec(ra.y, rb.y) || !(ra.graphical == rb.graphical) || !(ra.limiting == rb.limiting) ||
        ra.uniqueness.has_value() != rb.uniqueness.has_value())
      return false;
    if (ra.uniqueness &&
        (ra.uniqueness->holds != rb.uniqueness->holds || !same_opt_vec(ra.uniqueness->witness, rb.uniqueness->witness)))
      return false;
  }
  for (size_t i = 0; i < a.verdicts.size(); ++i)
    if (!same_ic(a.verdicts[i], b.verdicts[i])) return false;
  return true;
}

AnalysisReport analyze(const CompositeProblem& p, const Vec& x, const std::optional<Vec>& y, Mode mode,
                       const AnalysisOptions& opts) {
  check_dims(p, &x, y ? &*y : nullptr);
  const Params zero = Params::zero(p.n, p.m);
  AnalysisReport r;
  r.x = x;
  r.y = y;
  r.mode = mode;
  const MultiplierPolytope mp = multiplier_polytope(p, x, zero, opts.lp);
  r.stationary = !mp.empty;
  if (!r.stationary) fail(Errc::NotStationary, "no multiplier exists at x");
  if (y) {
    r.residual = residual(p, {x, *y}, zero);
    if (r.residual->norm() > opts.stat_tol) fail(Errc::NotAMultiplier, "y is not a multiplier at x");
  } else if (!mp.vertices.empty()) {
    r.residual = residual(p, {x, mp.vertices.front()}, zero);
  }
  r.cq = check_cq(p, x, opts.lp);
  r.polytope_bounded = mp.bounded;
  r.vertex_limit = mp.vertex_limit;
  r.vertices = mp.vertices;
  r.rays = mp.rays;
  std::vector<Vec> ys = mp.vertices;
  if (y) {
    bool listed = false;
    for (const auto& v : ys) listed = listed || (v - *y).lpNorm<Eigen::Infinity>() <= 1e-12;
    if (!listed) ys.insert(ys.begin(), *y);
  }
  for (const auto& yy : ys) {
    MultiplierRow row;
    row.y = yy;
    row.graphical = guarded_noncritical(p, x, yy, DerivKind::Graphical, opts);
    row.limiting = guarded_noncritical(p, x, yy, DerivKind::Limiting, opts);
    try {
      row.uniqueness = check_uniqueness_cond(p, x, yy, DerivKind::Graphical, opts);
    } catch (const Error& e) {
      if (e.code() != Errc::BranchLimitExceeded) throw;
    }
    r.multipliers.push_back(row);
  }
  const CriticalSearch cs = search_critical_multiplier(p, x, DerivKind::Graphical, opts);
  r.critical = cs.witness;
  r.critical_path = cs.path;
  r.critical_exhaustive = cs.exhaustive;
  r.strict_complementarity = strict_complementarity(p, x, opts);
  if (y) {
    r.aubin_M1 = check_aubin_M1(p, x, *y, opts);
    r.verdicts.push_back(verdict_ic_M1(p, x, *y, mode, opts));
  }
  r.verdicts.push_back(verdict_ic_M(p, x, mode, opts));
  return r;
}

Json to_json(const Vec& v) {
  Json j = Json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) fail(Errc::Schema, "expected a number array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(Errc::Schema, "expected a number array");
    v(i) = j[i].get<double>();
  }
  return v;
}

Json to_json(const CriticalityVerdict& v) {
  Json j = {{"status", crit_status_name(v.status)},
            {"kind", deriv_kind_name(v.kind)},
            {"proof_path", proof_path_name(v.path)},
            {"reason", v.reason}};
  if (v.witness)
    j["witness"] = {{"dv", to_json(v.witness->dv)},
                    {"du", to_json(v.witness->du)},
                    {"dx", to_json(v.witness->dx)},
                    {"dy", to_json(v.witness->dy)}};
  return j;
}

CriticalityVerdict criticality_from_json(const Json& j) {
  CriticalityVerdict v;
  v.status = enum_from<CritStatus>(j, "status", {CritStatus::Noncritical, CritStatus::Critical, CritStatus::Inconclusive},
                                   crit_status_name);
  v.kind = enum_from<DerivKind>(j, "kind", {DerivKind::Graphical, DerivKind::Limiting}, deriv_kind_name);
  v.path = path_from(j, "proof_path");
  v.reason = j.value("reason", "");
  v.witness = opt_from<DirectionPD>(j, "witness", [](const Json& w) {
    return DirectionPD{vec_from_json(w.at("dv")), vec_from_json(w.at("du")), vec_from_json(w.at("dx")),
                       vec_from_json(w.at("dy"))};
  });
  return v;
}

Json to_json(const ICVerdict& v) {
  Json j = {{"target", target_name(v.target)},
            {"answer", answer_name(v.answer)},
            {"proof_path", proof_path_name(v.path)},
            {"reason", v.reason},
            {"notes", v.notes},
            {"assumptions",
             {{"cq_checked", v.assumptions.cq_checked},
              {"cq_holds", v.assumptions.cq_holds},
              {"polyhedral_ic_automatic", v.assumptions.polyhedral_ic_automatic},
              {"necessary_only", v.assumptions.necessary_only},
              {"strict_complementarity", v.assumptions.strict_complementarity}}}};
  if (v.witness) {
    Json w = Json::object();
    if (v.witness->y) w["y"] = to_json(*v.witness->y);
    if (v.witness->dx) w["dx"] = to_json(*v.witness->dx);
    if (v.witness->dy) w["dy"] = to_json(*v.witness->dy);
    j["witness"] = w;
  }
  return j;
}

ICVerdict ic_verdict_from_json(const Json& j) {
  ICVerdict v;
  v.target = enum_from<IcTarget>(j, "target", {IcTarget::M1At, IcTarget::M1Around, IcTarget::MAt, IcTarget::MAround},
                                 target_name);
  v.answer = enum_from<IcAnswer>(j, "answer", {IcAnswer::Yes, IcAnswer::No, IcAnswer::Inconclusive}, answer_name);
  v.path = path_from(j, "proof_path");
  v.reason = j.value("reason", "");
  v.notes = j.value("notes", std::vector<std::string>{});
  const Json& a = j.at("assumptions");
  v.assumptions.cq_checked = a.at("cq_checked").get<bool>();
  v.assumptions.cq_holds = a.at("cq_holds").get<bool>();
  v.assumptions.polyhedral_ic_automatic = a.at("polyhedral_ic_automatic").get<bool>();
  v.assumptions.necessary_only = a.at("necessary_only").get<bool>();
  v.assumptions.strict_complementarity = a.at("strict_complementarity").get<bool>();
  v.witness = opt_from<IcWitness>(j, "witness", [](const Json& w) {
    IcWitness out;
    out.y = opt_from<Vec>(w, "y", vec_from_json);
    out.dx = opt_from<Vec>(w, "dx", vec_from_json);
    out.dy = opt_from<Vec>(w, "dy", vec_from_json);
    return out;
  });
  return v;
}

Json to_json(const AnalysisReport& r) {
  Json j = {{"schema", 1}, {"x", to_json(r.x)}, {"mode", mode_name(r.mode)}, {"stationary", r.stationary}};
  if (r.y) j["y"] = to_json(*r.y);
  if (r.residual) j["residual"] = {{"r_grad", r.residual->grad}, {"r_graph", r.residual->graph}};
  j["cq"] = {{"holds", r.cq.holds}};
  if (r.cq.certificate) j["cq"]["certificate"] = to_json(*r.cq.certificate);
  Json poly = {{"bounded", r.polytope_bounded}, {"vertex_limit", r.vertex_limit}};
  poly["vertices"] = Json::array();
  for (const auto& v : r.vertices) poly["vertices"].push_back(to_json(v));
  poly["rays"] = Json::array();
  for (const auto& v : r.rays) poly["rays"].push_back(to_json(v));
  j["multiplier_polytope"] = poly;
  j["multipliers"] = Json::array();
  for (const auto& row : r.multipliers) {
    Json jr = {{"y", to_json(row.y)}, {"graphical", to_json(row.graphical)}, {"limiting", to_json(row.limiting)}};
    if (row.uniqueness) {
      jr["uniqueness"] = {{"holds", row.uniqueness->holds}};
      if (row.uniqueness->witness) jr["uniqueness"]["witness"] = to_json(*row.uniqueness->witness);
    }
    j["multipliers"].push_back(jr);
  }
  Json crit = {{"proof_path", proof_path_name(r.critical_path)}, {"exhaustive", r.critical_exhaustive}};
  if (r.critical)
    crit["witness"] = {{"y", to_json(r.critical->y)}, {"dx", to_json(r.critical->dx)}, {"dy", to_json(r.critical->dy)}};
  j["critical_search"] = crit;
  j["strict_complementarity"] = r.strict_complementarity;
  if (r.aubin_M1) j["aubin_M1"] = *r.aubin_M1;
  j["verdicts"] = Json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  return j;
}

AnalysisReport report_from_json(const Json& j) {
  try {
    if (j.at("schema").get<int>() != 1) fail(Errc::Schema, "unsupported report schema");
    AnalysisReport r;
    r.x = vec_from_json(j.at("x"));
    r.y = opt_from<Vec>(j, "y", vec_from_json);
    r.mode = enum_from<Mode>(j, "mode", {Mode::At, Mode::Around}, mode_name);
    r.stationary = j.at("stationary").get<bool>();
    r.residual = opt_from<Residual>(j, "residual", [](const Json& v) {
      return Residual{v.at("r_grad").get<double>(), v.at("r_graph").get<double>()};
    });
    r.cq.holds = j.at("cq").at("holds").get<bool>();
    r.cq.certificate = opt_from<Vec>(j.at("cq"), "certificate", vec_from_json);
    const Json& poly = j.at("multiplier_polytope");
    r.polytope_bounded = poly.at("bounded").get<bool>();
    r.vertex_limit = poly.at("vertex_limit").get<bool>();
    for (const auto& v : poly.at("vertices")) r.vertices.push_back(vec_from_json(v));
    for (const auto& v : poly.at("rays")) r.rays.push_back(vec_from_json(v));
    for (const auto& jr : j.at("multipliers")) {
      MultiplierRow row;
      row.y = vec_from_json(jr.at("y"));
      row.graphical = criticality_from_json(jr.at("graphical"));
      row.limiting = criticality_from_json(jr.at("limiting"));
      row.uniqueness = opt_from<UniquenessResult>(jr, "uniqueness", [](const Json& u) {
        return UniquenessResult{u.at("holds").get<bool>(), opt_from<Vec>(u, "witness", vec_from_json)};
      });
      r.multipliers.push_back(row);
    }
    const Json& crit = j.at("critical_search");
    r.critical_path = path_from(crit, "proof_path");
    r.critical_exhaustive = crit.at("exhaustive").get<bool>();
    r.critical = opt_from<CriticalWitness>(crit, "witness", [](const Json& w) {
      return CriticalWitness{vec_from_json(w.at("y")), vec_from_json(w.at("dx")), vec_from_json(w.at("dy"))};
    });
    r.strict_complementarity = j.at("strict_complementarity").get<bool>();
    r.aubin_M1 = opt_from<bool>(j, "aubin_M1", [](const Json& b) { return b.get<bool>(); });
    for (const auto& v : j.at("verdicts")) r.verdicts.push_back(ic_verdict_from_json(v));
    return r;
  } catch (const Json::exception& e) {
    fail(Errc::Schema, std::string("malformed report: ") + e.what());
  }
}

std::string to_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "point x = " << fmt_vec(r.x) << "\n";
  if (r.y) os << "multiplier y = " << fmt_vec(*r.y) << "\n";
  if (r.residual) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "stationarity residual: r_grad = %.3e, r_graph = %.3e\n", r.residual->grad,
                  r.residual->graph);
    os << buf;
  }
  os << "qualification condition: " << (r.cq.holds ? "holds" : "fails");
  if (r.cq.certificate) os << " (certificate " << fmt_vec(*r.cq.certificate) << ")";
  os << "\nmultiplier set: " << (r.polytope_bounded ? "bounded" : "unbounded") << "\n";
  for (const auto& v : r.vertices) os << "  vertex " << fmt_vec(v) << "\n";
  for (const auto& v : r.rays) os << "  ray    " << fmt_vec(v) << "\n";
  if (r.vertex_limit) os << "  (vertices not enumerated)\n";
  os << "multipliers:\n";
  for (const auto& row : r.multipliers) {
    os << "  y = " << fmt_vec(row.y) << ": " << crit_status_name(row.graphical.status) << " ["
       << proof_path_name(row.graphical.path) << "], strongly "
       << crit_status_name(row.limiting.status);
    if (row.graphical.witness) os << ", dx = " << fmt_vec(row.graphical.witness->dx) << ", dy = "
                                  << fmt_vec(row.graphical.witness->dy);
    if (row.uniqueness)
      os << "; uniqueness condition " << (row.uniqueness->holds ? "holds" : "fails")
         << (row.uniqueness->witness ? " with dy = " + fmt_vec(*row.uniqueness->witness) : std::string());
    os << "\n";
  }
  os << "critical multiplier: ";
  if (r.critical)
    os << "y = " << fmt_vec(r.critical->y) << ", dx = " << fmt_vec(r.critical->dx) << ", dy = "
       << fmt_vec(r.critical->dy);
  else
    os << "none";
  os << " [" << proof_path_name(r.critical_path) << (r.critical_exhaustive ? "" : ", not exhaustive") << "]\n";
  os << "strict complementarity: " << (r.strict_complementarity ? "yes" : "no") << "\n";
  if (r.aubin_M1) os << "Aubin property of M1: " << (*r.aubin_M1 ? "yes" : "no") << "\n";
  for (const auto& v : r.verdicts) {
    os << target_name(v.target) << " isolated calmness: " << answer_name(v.answer) << " ["
       << proof_path_name(v.path) << "]";
    if (v.witness) {
      if (v.witness->y) os << " y = " << fmt_vec(*v.witness->y);
      if (v.witness->dx) os << " dx = " << fmt_vec(*v.witness->dx);
      if (v.witness->dy) os << " dy = " << fmt_vec(*v.witness->dy);
    }
    if (!v.reason.empty()) os << " (" << v.reason << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace polycrit
