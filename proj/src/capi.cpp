#include "polycrit/polycrit.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

#include "error.hpp"
#include "experiments.hpp"

using namespace polycrit;

struct pcrit_problem {
  CompositeProblem p;
};

struct pcrit_trace {
  SolveTrace t;
};

namespace {

thread_local std::string last_error;

template <class F>
pcrit_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return PCRIT_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<pcrit_status>(static_cast<int>(e.code()));
  } catch (const Json::exception& e) {
    last_error = e.what();
    return PCRIT_SCHEMA_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PCRIT_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PCRIT_INTERNAL_ERROR;
  }
}

void require(const void* ptr, const char* what) {
  if (!ptr) fail(Errc::InvalidArgument, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Vec to_vec(const double* v, int k) {
  Vec out(k);
  for (int i = 0; i < k; ++i) out(i) = v[i];
  return out;
}

void copy_out(const Vec& v, double* dst) {
  if (dst)
    for (int i = 0; i < v.size(); ++i) dst[i] = v(i);
}

}  // namespace

extern "C" {

const char* pcrit_version(void) { return "1.0.0"; }

const char* pcrit_status_name(pcrit_status status) {
  if (status == PCRIT_OK) return "Ok";
  if (status < PCRIT_INVALID_ARGUMENT || status > PCRIT_INTERNAL_ERROR) return "Unknown";
  return errc_name(static_cast<Errc>(static_cast<int>(status)));
}

const char* pcrit_last_error(void) { return last_error.c_str(); }

void pcrit_free_string(char* s) { std::free(s); }

pcrit_status pcrit_problem_parse(const char* json_text, pcrit_problem** out) {
  return guard([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = nullptr;
    Json j;
    try {
      j = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
      fail(Errc::Schema, std::string("invalid JSON: ") + e.what());
    }
    *out = new pcrit_problem{problem_from_json(j)};
  });
}

pcrit_status pcrit_problem_load(const char* path, pcrit_problem** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new pcrit_problem{load_problem(path)};
  });
}

void pcrit_problem_free(pcrit_problem* p) { delete p; }

int pcrit_problem_n(const pcrit_problem* p) { return p ? p->p.n : -1; }

int pcrit_problem_m(const pcrit_problem* p) { return p ? p->p.m : -1; }

int pcrit_problem_equality_only(const pcrit_problem* p) { return p && p->p.equality_only() ? 1 : 0; }

pcrit_status pcrit_problem_point(const pcrit_problem* p, const char* name, double* x, double* y, int* has_y) {
  return guard([&] {
    require(p, "problem");
    require(name, "name");
    const auto it = p->p.points.find(name);
    if (it == p->p.points.end()) fail(Errc::InvalidArgument, std::string("no point named '") + name + "'");
    copy_out(it->second.x, x);
    if (it->second.y) copy_out(*it->second.y, y);
    if (has_y) *has_y = it->second.y ? 1 : 0;
  });
}

pcrit_status pcrit_residual(const pcrit_problem* p, const double* x, const double* y, double* r_grad,
                            double* r_graph) {
  return guard([&] {
    require(p, "problem");
    require(x, "x");
    require(y, "y");
    const Residual r = residual(p->p, {to_vec(x, p->p.n), to_vec(y, p->p.m)}, Params::zero(p->p.n, p->p.m));
    if (r_grad) *r_grad = r.grad;
    if (r_graph) *r_graph = r.graph;
  });
}

pcrit_status pcrit_analyze(const pcrit_problem* p, const double* x, const double* y, pcrit_mode mode,
                           pcrit_format format, char** out, int* inconclusive) {
  return guard([&] {
    require(p, "problem");
    require(x, "x");
    require(out, "out");
    *out = nullptr;
    std::optional<Vec> yy;
    if (y) yy = to_vec(y, p->p.m);
    const AnalysisReport r = analyze(p->p, to_vec(x, p->p.n), yy, mode == PCRIT_MODE_AROUND ? Mode::Around : Mode::At);
    *out = dup_string(format == PCRIT_FORMAT_JSON ? to_json(r).dump(2) : to_text(r));
    if (inconclusive) *inconclusive = r.any_inconclusive() ? 1 : 0;
  });
}

pcrit_solver_options pcrit_solver_options_default(void) {
  const SolverOptions d;
  return {d.tol, d.max_iter, d.branch_retries, d.kappa, d.beta, d.divergence};
}

pcrit_status pcrit_solve(const pcrit_problem* p, pcrit_method method, const double* x0, const double* y0,
                         const pcrit_solver_options* opts, pcrit_trace** out) {
  return guard([&] {
    require(p, "problem");
    require(x0, "x0");
    require(y0, "y0");
    require(out, "out");
    *out = nullptr;
    const pcrit_solver_options o = opts ? *opts : pcrit_solver_options_default();
    SolverOptions so;
    so.tol = o.tol;
    so.max_iter = o.max_iter;
    so.branch_retries = o.branch_retries;
    so.kappa = o.kappa;
    so.beta = o.beta;
    so.divergence = o.divergence;
    const Vec x = to_vec(x0, p->p.n), y = to_vec(y0, p->p.m);
    SolveTrace t;
    if (method == PCRIT_METHOD_SSN)
      t = solve_ge(p->p, x, y, so);
    else if (method == PCRIT_METHOD_NEWTON)
      t = newton_kkt(p->p, x, y, so);
    else
      fail(Errc::InvalidArgument, "unknown method");
    *out = new pcrit_trace{std::move(t)};
  });
}

pcrit_solve_status pcrit_trace_status(const pcrit_trace* t) {
  if (!t) return PCRIT_DIVERGED;
  switch (t->t.status) {
    case SolveStatus::Solved: return PCRIT_SOLVED;
    case SolveStatus::MaxIter: return PCRIT_MAX_ITER;
    case SolveStatus::SingularSystem: return PCRIT_SINGULAR;
    case SolveStatus::Diverged: return PCRIT_DIVERGED;
  }
  return PCRIT_DIVERGED;
}

int pcrit_trace_length(const pcrit_trace* t) { return t ? static_cast<int>(t->t.iters.size()) : -1; }

int pcrit_trace_newton_steps(const pcrit_trace* t) { return t ? t->t.newton_steps : -1; }

pcrit_status pcrit_trace_iterate(const pcrit_trace* t, int k, double* x, double* y, double* r_grad,
                                 double* r_graph) {
  return guard([&] {
    require(t, "trace");
    if (k < 0 || k >= static_cast<int>(t->t.iters.size())) fail(Errc::InvalidArgument, "iterate index out of range");
    const IterRecord& rec = t->t.iters[k];
    copy_out(rec.x, x);
    copy_out(rec.y, y);
    if (r_grad) *r_grad = rec.r_grad;
    if (r_graph) *r_graph = rec.r_graph;
  });
}

pcrit_status pcrit_trace_csv(const pcrit_trace* t, char** out) {
  return guard([&] {
    require(t, "trace");
    require(out, "out");
    *out = dup_string(t->t.to_csv());
  });
}

pcrit_status pcrit_trace_summary(const pcrit_trace* t, char** out) {
  return guard([&] {
    require(t, "trace");
    require(out, "out");
    const SolveTrace& tr = t->t;
    const double order = tr.order_estimate();
    Json j = {{"method", tr.method},
              {"status", solve_status_name(tr.status)},
              {"iterations", tr.iters.size()},
              {"newton_steps", tr.newton_steps},
              {"r_grad", tr.iters.empty() ? 0.0 : tr.last().r_grad},
              {"r_graph", tr.iters.empty() ? 0.0 : tr.last().r_graph},
              {"ratios", tr.ratios()},
              {"step_ratios", tr.step_ratios()},
              {"order_estimate", std::isfinite(order) ? Json(order) : Json(nullptr)},
              {"message", tr.message}};
    if (!tr.iters.empty()) {
      j["x"] = to_json(tr.last().x);
      j["y"] = to_json(tr.last().y);
    }
    *out = dup_string(j.dump());
  });
}

void pcrit_trace_free(pcrit_trace* t) { delete t; }

pcrit_status pcrit_verify(const pcrit_problem* p, const double* x, const double* y, int samples, uint64_t seed,
                          char** report_json, int* passed) {
  return guard([&] {
    require(p, "problem");
    require(x, "x");
    VerifyOptions vo;
    vo.samples = samples;
    vo.seed = seed;
    std::optional<Vec> yy;
    if (y) yy = to_vec(y, p->p.m);
    const VerifyReport rep = verify_instance(p->p, to_vec(x, p->p.n), yy, vo);
    if (report_json) {
      Json j = {{"passed", rep.passed}, {"suites", Json::array()}};
      for (const auto& s : rep.suites)
        j["suites"].push_back({{"name", s.name},
                               {"probes", s.probes},
                               {"agree", s.agree},
                               {"threshold", s.threshold},
                               {"passed", s.passed},
                               {"detail", s.detail}});
      *report_json = dup_string(j.dump(2));
    }
    if (passed) *passed = rep.passed ? 1 : 0;
  });
}

pcrit_status pcrit_experiment(const pcrit_problem* p, const char* name, const char* options_json, char** csv,
                              char** summary_json, int* passed) {
  return guard([&] {
    require(p, "problem");
    require(name, "name");
    ExperimentOptions eo;
    if (options_json) {
      const Json j = Json::parse(options_json);
      if (!j.is_object()) fail(Errc::Schema, "experiment options must be an object");
      if (j.contains("method")) eo.method = j["method"].get<std::string>();
      if (j.contains("x")) eo.x = vec_from_json(j["x"]);
      if (j.contains("y")) eo.y = vec_from_json(j["y"]);
      eo.grid_points = j.value("grid_points", eo.grid_points);
      eo.samples = j.value("samples", eo.samples);
      eo.radius = j.value("radius", eo.radius);
      eo.seed = j.value("seed", eo.seed);
      eo.solver.tol = j.value("tol", eo.solver.tol);
      eo.solver.max_iter = j.value("max_iter", eo.solver.max_iter);
    }
    const ExperimentResult r = run_experiment(name, p->p, eo);
    if (csv) *csv = dup_string(r.csv);
    if (summary_json) *summary_json = dup_string(r.summary.dump(2));
    if (passed) *passed = r.passed ? 1 : 0;
  });
}

}  // extern "C"
