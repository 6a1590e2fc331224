#include "problem.hpp"

#include <fstream>
#include <sstream>

#include "error.hpp"

namespace polycrit {

void CompositeProblem::validate() const {
  if (n < 1 || m < 0) fail(Errc::Schema, "need n >= 1 and m >= 0");
  if (static_cast<int>(F.size()) != m || static_cast<int>(g.size()) != m)
    fail(Errc::Schema, "F and g must have m entries");
  if (!f0.valid() || f0.arity() != n) fail(Errc::Schema, "f0 missing or of wrong arity");
  for (const auto& e : F)
    if (!e.valid() || e.arity() != n) fail(Errc::Schema, "F entry of wrong arity");
  for (const auto& gi : g) gi.validate();
}

bool CompositeProblem::convex() const {
  for (const auto& gi : g)
    if (!gi.convex()) return false;
  return true;
}

bool CompositeProblem::equality_only() const {
  for (const auto& gi : g)
    if (gi.kind != PieceKind::Zero) return false;
  return true;
}

void check_dims(const CompositeProblem& p, const Vec* x, const Vec* y) {
  if (x && x->size() != p.n)
    fail(Errc::DimensionMismatch, "x has length " + std::to_string(x->size()) + ", expected " +
                                      std::to_string(p.n));
  if (y && y->size() != p.m)
    fail(Errc::DimensionMismatch, "y has length " + std::to_string(y->size()) + ", expected " +
                                      std::to_string(p.m));
  if (x && !x->allFinite()) fail(Errc::InvalidArgument, "x has nonfinite entries");
  if (y && !y->allFinite()) fail(Errc::InvalidArgument, "y has nonfinite entries");
}

Evaluation evaluate(const CompositeProblem& p, const Vec& x) {
  check_dims(p, &x, nullptr);
  Evaluation ev;
  const Jet2 j0 = p.f0.eval012(x);
  ev.f0 = j0.value;
  ev.grad_f0 = j0.grad;
  ev.hess_f0 = j0.hess;
  ev.Fx = Vec::Zero(p.m);
  ev.jac = Mat::Zero(p.m, p.n);
  for (int i = 0; i < p.m; ++i) {
    Jet2 ji = p.F[i].eval012(x);
    ev.Fx(i) = ji.value;
    ev.jac.row(i) = ji.grad.transpose();
    ev.hessF.push_back(std::move(ji.hess));
  }
  return ev;
}

Vec lagrangian_gradient(const Evaluation& ev, const Vec& y) {
  return ev.grad_f0 + ev.jac.transpose() * y;
}

Mat lagrangian_hessian(const Evaluation& ev, const Vec& y) {
  Mat h = ev.hess_f0;
  for (size_t i = 0; i < ev.hessF.size(); ++i) h += y(static_cast<int>(i)) * ev.hessF[i];
  return h;
}

LagrangianDerivs lagrangian_xderivs(const CompositeProblem& p, const Vec& x, const Vec& y) {
  check_dims(p, &x, &y);
  const Evaluation ev = evaluate(p, x);
  return {lagrangian_gradient(ev, y), lagrangian_hessian(ev, y)};
}

namespace {

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) fail(Errc::Schema, std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

std::vector<double> numbers(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) fail(Errc::Schema, std::string("missing array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) fail(Errc::Schema, std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

Vec to_vec(const Json& j, int expect, const std::string& what) {
  if (!j.is_array()) fail(Errc::Schema, what + " must be an array");
  if (static_cast<int>(j.size()) != expect)
    fail(Errc::Schema, what + " must have " + std::to_string(expect) + " entries");
  Vec v(expect);
  for (int i = 0; i < expect; ++i) {
    if (!j[i].is_number()) fail(Errc::Schema, what + " has a non-numeric entry");
    v(i) = j[i].get<double>();
  }
  return v;
}

Json from_vec(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

template <class F>
auto schema_guard(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::Schema) throw;
    fail(Errc::Schema, where + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Schema, where + ": " + e.what());
  }
}

}  // namespace

GPiece piece_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(Errc::Schema, "g entry needs a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  return schema_guard("g piece '" + kind + "'", [&] {
    if (kind == "zero") return GPiece::zero();
    if (kind == "nonpos") return GPiece::nonpos();
    if (kind == "free") return GPiece::free();
    if (kind == "box") return GPiece::box(number(j, "l"), number(j, "u"));
    if (kind == "abs") return GPiece::abs(number(j, "alpha"));
    if (kind == "l0") return GPiece::l0(number(j, "alpha"));
    if (kind == "pwa") return GPiece::pwa(numbers(j, "breakpoints"), numbers(j, "slopes"));
    fail(Errc::Schema, "unknown g kind '" + kind + "'");
  });
}

Json piece_to_json(const GPiece& g) {
  Json j = {{"kind", g.name()}};
  switch (g.kind) {
    case PieceKind::Box:
      j["l"] = g.l;
      j["u"] = g.u;
      break;
    case PieceKind::Abs:
    case PieceKind::L0: j["alpha"] = g.alpha; break;
    case PieceKind::Pwa:
      j["breakpoints"] = g.breakpoints;
      j["slopes"] = g.slopes;
      break;
    default: break;
  }
  return j;
}

CompositeProblem problem_from_json(const Json& j) {
  if (!j.is_object()) fail(Errc::Schema, "problem must be a JSON object");
  if (j.contains("schema") && (!j["schema"].is_number_integer() || j["schema"].get<int>() != 1))
    fail(Errc::Schema, "unsupported schema version");
  CompositeProblem p;
  p.n = static_cast<int>(number(j, "n"));
  p.m = static_cast<int>(number(j, "m"));
  if (p.n < 1 || p.m < 0 || p.n > 64 || p.m > 64) fail(Errc::Schema, "n must be in 1..64, m in 0..64");
  if (!j.contains("f0") || !j["f0"].is_string()) fail(Errc::Schema, "missing string 'f0'");
  schema_guard("f0", [&] {
    p.f0 = Expr::parse(j["f0"].get<std::string>(), p.n);
    return 0;
  });
  const Json F = j.contains("F") ? j["F"] : Json::array();
  const Json g = j.contains("g") ? j["g"] : Json::array();
  if (!F.is_array() || !g.is_array()) fail(Errc::Schema, "'F' and 'g' must be arrays");
  if (static_cast<int>(F.size()) != p.m || static_cast<int>(g.size()) != p.m)
    fail(Errc::Schema, "'F' and 'g' must have m entries");
  for (const auto& e : F) {
    if (!e.is_string()) fail(Errc::Schema, "F entries must be strings");
    schema_guard("F[" + std::to_string(p.F.size()) + "]", [&] {
      p.F.push_back(Expr::parse(e.get<std::string>(), p.n));
      return 0;
    });
  }
  for (const auto& gi : g) p.g.push_back(piece_from_json(gi));
  if (j.contains("points")) {
    if (!j["points"].is_object()) fail(Errc::Schema, "'points' must be an object");
    for (const auto& [name, pt] : j["points"].items()) {
      if (!pt.is_object() || !pt.contains("x")) fail(Errc::Schema, "point '" + name + "' needs 'x'");
      NamedPoint np;
      np.x = to_vec(pt["x"], p.n, "points." + name + ".x");
      if (pt.contains("y")) np.y = to_vec(pt["y"], p.m, "points." + name + ".y");
      p.points[name] = np;
    }
  }
  p.validate();
  return p;
}

Json problem_to_json(const CompositeProblem& p) {
  Json j = {{"schema", 1}, {"n", p.n}, {"m", p.m}, {"f0", p.f0.to_string()}};
  j["F"] = Json::array();
  for (const auto& e : p.F) j["F"].push_back(e.to_string());
  j["g"] = Json::array();
  for (const auto& gi : p.g) j["g"].push_back(piece_to_json(gi));
  if (!p.points.empty()) {
    j["points"] = Json::object();
    for (const auto& [name, pt] : p.points) {
      Json o = {{"x", from_vec(pt.x)}};
      if (pt.y) o["y"] = from_vec(*pt.y);
      j["points"][name] = o;
    }
  }
  return j;
}

CompositeProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::Schema, path + ": " + e.what());
  }
  return problem_from_json(j);
}

}  // namespace polycrit
