#include <polycrit/polycrit.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using Json = nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kInconclusive = 3, kMaxIter = 4 };

struct Owned {
  char* s = nullptr;
  ~Owned() { pcrit_free_string(s); }
};

struct Problem {
  pcrit_problem* p = nullptr;
  ~Problem() { pcrit_problem_free(p); }
};

std::optional<std::vector<double>> parse_list(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t end = std::min(text.find(',', pos), text.size());
    std::string item = text.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (!item.empty() && item.front() == '+') item.erase(item.begin());
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v)) return std::nullopt;
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

void report_error(pcrit_status st) {
  std::cerr << "error: " << pcrit_status_name(st) << ": " << pcrit_last_error() << "\n";
}

// Parses a flag vector of length k; prints a usage error on failure.
bool read_vector(const std::string& flag, const std::string& text, int k, std::vector<double>& out) {
  const auto v = parse_list(text);
  if (!v) {
    std::cerr << "error: " << flag << " expects comma-separated numbers, got '" << text << "'\n";
    return false;
  }
  if (static_cast<int>(v->size()) != k) {
    std::cerr << "error: " << flag << " needs " << k << " entries, got " << v->size() << "\n";
    return false;
  }
  out = *v;
  return true;
}

// File points are consulted when --point is given or --x is omitted; on conflict the file wins.
int resolve_point(const pcrit_problem* p, const std::optional<std::string>& point, const std::optional<std::string>& xflag,
                  const std::optional<std::string>& yflag, std::vector<double>& x, std::optional<std::vector<double>>& y) {
  const int n = pcrit_problem_n(p), m = pcrit_problem_m(p);
  const std::string name = point.value_or("xbar");
  std::vector<double> fx(n), fy(m);
  int has_y = 0;
  const bool has_file = (point || !xflag) && pcrit_problem_point(p, name.c_str(), fx.data(), fy.data(), &has_y) == PCRIT_OK;
  if (point && !has_file) {
    std::cerr << "error: the problem file has no point '" << name << "'\n";
    return kUsage;
  }
  if (xflag) {
    if (!read_vector("--x", *xflag, n, x)) return kUsage;
    if (has_file && x != fx) {
      std::cerr << "warning: --x conflicts with point '" << name << "' in the problem file; using the file\n";
      x = fx;
    }
  } else if (has_file) {
    x = fx;
  } else {
    std::cerr << "error: --x is required (the problem file has no point '" << name << "')\n";
    return kUsage;
  }
  if (yflag) {
    std::vector<double> v;
    if (!read_vector("--y", *yflag, m, v)) return kUsage;
    if (has_file && has_y && v != fy) {
      std::cerr << "warning: --y conflicts with point '" << name << "' in the problem file; using the file\n";
      v = fy;
    }
    y = v;
  } else if (has_file && has_y) {
    y = fy;
  }
  return kOk;
}

pcrit_status load(const std::string& path, Problem& prob) { return pcrit_problem_load(path.c_str(), &prob.p); }

int cmd_analyze(const std::string& path, const std::optional<std::string>& point, const std::optional<std::string>& xs,
                const std::optional<std::string>& ys, const std::string& mode, const std::string& format) {
  Problem prob;
  if (const auto st = load(path, prob); st != PCRIT_OK) {
    report_error(st);
    return kInvalid;
  }
  std::vector<double> x;
  std::optional<std::vector<double>> y;
  if (const int rc = resolve_point(prob.p, point, xs, ys, x, y); rc != kOk) return rc;
  Owned out;
  int inconclusive = 0;
  const auto st = pcrit_analyze(prob.p, x.data(), y ? y->data() : nullptr,
                                mode == "around" ? PCRIT_MODE_AROUND : PCRIT_MODE_AT,
                                format == "json" ? PCRIT_FORMAT_JSON : PCRIT_FORMAT_TEXT, &out.s, &inconclusive);
  if (st != PCRIT_OK) {
    report_error(st);
    return kInvalid;
  }
  std::cout << out.s;
  if (format == "json") std::cout << "\n";
  return inconclusive ? kInconclusive : kOk;
}

int cmd_solve(const std::string& path, const std::string& method, const std::string& x0s, const std::string& y0s,
              double tol, int max_iter, const std::optional<std::string>& trace_path) {
  Problem prob;
  if (const auto st = load(path, prob); st != PCRIT_OK) {
    report_error(st);
    return kInvalid;
  }
  std::vector<double> x0, y0;
  if (!read_vector("--x0", x0s, pcrit_problem_n(prob.p), x0) || !read_vector("--y0", y0s, pcrit_problem_m(prob.p), y0))
    return kUsage;
  if (method == "newton" && !pcrit_problem_equality_only(prob.p)) {
    std::cerr << "error: method 'newton' requires every g piece to be zero\n";
    return kUsage;
  }
  pcrit_solver_options opts = pcrit_solver_options_default();
  opts.tol = tol;
  opts.max_iter = max_iter;
  pcrit_trace* trace = nullptr;
  const auto st = pcrit_solve(prob.p, method == "newton" ? PCRIT_METHOD_NEWTON : PCRIT_METHOD_SSN, x0.data(),
                              y0.data(), &opts, &trace);
  if (st != PCRIT_OK) {
    report_error(st);
    return st == PCRIT_INVALID_ARGUMENT ? kUsage : kInvalid;
  }
  Owned csv, summary;
  pcrit_trace_csv(trace, &csv.s);
  pcrit_trace_summary(trace, &summary.s);
  const pcrit_solve_status status = pcrit_trace_status(trace);
  pcrit_trace_free(trace);
  if (trace_path) {
    std::ofstream f(*trace_path);
    if (!f || !(f << csv.s)) {
      std::cerr << "error: cannot write " << *trace_path << "\n";
      return kInvalid;
    }
  }
  const Json s = Json::parse(summary.s);
  std::printf("method: %s\nstatus: %s\nnewton steps: %d\n", s["method"].get<std::string>().c_str(),
              s["status"].get<std::string>().c_str(), s["newton_steps"].get<int>());
  std::printf("x = %s\ny = %s\n", s["x"].dump().c_str(), s["y"].dump().c_str());
  std::printf("r_grad = %.3e, r_graph = %.3e\n", s["r_grad"].get<double>(), s["r_graph"].get<double>());
  const auto ratios = s["ratios"].get<std::vector<double>>();
  if (!ratios.empty()) {
    const size_t from = ratios.size() > 5 ? ratios.size() - 5 : 0;
    double mean = 0.0;
    std::printf("last ratios:");
    for (size_t k = from; k < ratios.size(); ++k) {
      std::printf(" %.6g", ratios[k]);
      mean += ratios[k];
    }
    std::printf("\nmean of last ratios: %.6g\n", mean / static_cast<double>(ratios.size() - from));
  }
  const auto steps = s["step_ratios"].get<std::vector<double>>();
  if (!steps.empty()) std::printf("last step ratio: %.6g\n", steps.back());
  if (!s["order_estimate"].is_null()) std::printf("order estimate: %.4g\n", s["order_estimate"].get<double>());
  if (!s["message"].get<std::string>().empty()) std::printf("note: %s\n", s["message"].get<std::string>().c_str());
  switch (status) {
    case PCRIT_SOLVED: return kOk;
    case PCRIT_MAX_ITER: return kMaxIter;
    default: return kInvalid;
  }
}

int cmd_verify(const std::string& path, const std::optional<std::string>& point, const std::optional<std::string>& xs,
               const std::optional<std::string>& ys, int samples, unsigned long long seed) {
  Problem prob;
  if (const auto st = load(path, prob); st != PCRIT_OK) {
    report_error(st);
    return kUsage;
  }
  std::vector<double> x;
  std::optional<std::vector<double>> y;
  if (const int rc = resolve_point(prob.p, point, xs, ys, x, y); rc != kOk) return rc;
  Owned rep;
  int passed = 0;
  const auto st = pcrit_verify(prob.p, x.data(), y ? y->data() : nullptr, samples, seed, &rep.s, &passed);
  if (st != PCRIT_OK) {
    report_error(st);
    return st == PCRIT_INVALID_ARGUMENT ? kUsage : kInvalid;
  }
  const Json j = Json::parse(rep.s);
  for (const auto& s : j["suites"]) {
    const long probes = s["probes"].get<long>(), agree = s["agree"].get<long>();
    std::printf("%-18s %s  %ld/%ld agree (%.2f%%, need %.0f%%)", s["name"].get<std::string>().c_str(),
                s["passed"].get<bool>() ? "pass" : "FAIL", agree, probes,
                probes ? 100.0 * static_cast<double>(agree) / static_cast<double>(probes) : 100.0,
                100.0 * s["threshold"].get<double>());
    if (!s["detail"].get<std::string>().empty()) std::printf("  %s", s["detail"].get<std::string>().c_str());
    std::printf("\n");
  }
  std::printf("%s\n", passed ? "verify: pass" : "verify: FAIL");
  return passed ? kOk : kInvalid;
}

int cmd_experiment(const std::string& name, const std::string& path, const Json& options,
                   const std::optional<std::string>& out_path) {
  Problem prob;
  if (const auto st = load(path, prob); st != PCRIT_OK) {
    report_error(st);
    return kUsage;
  }
  Owned csv, summary;
  int passed = 0;
  const auto st = pcrit_experiment(prob.p, name.c_str(), options.dump().c_str(), &csv.s, &summary.s, &passed);
  if (st != PCRIT_OK) {
    report_error(st);
    return st == PCRIT_UNKNOWN_EXPERIMENT || st == PCRIT_INVALID_ARGUMENT ? kUsage : kInvalid;
  }
  if (out_path) {
    std::ofstream f(*out_path);
    if (!f || !(f << csv.s)) {
      std::cerr << "error: cannot write " << *out_path << "\n";
      return kInvalid;
    }
    std::cout << summary.s << "\n";
  } else {
    std::cout << csv.s;
    std::cerr << summary.s << "\n";
  }
  return passed ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Criticality analysis and semismooth* Newton solver for composite problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pcrit_version()));

  std::string path, mode = "at", format = "text";
  std::optional<std::string> xs, ys, point;

  auto* analyze = app.add_subcommand("analyze", "Stationarity, qualification, criticality and calmness report");
  analyze->add_option("problem", path, "Problem file (JSON)")->required();
  analyze->add_option("--x", xs, "Point x, comma-separated");
  analyze->add_option("--y", ys, "Multiplier y, comma-separated");
  analyze->add_option("--point", point, "Named point of the problem file (default xbar when --x is omitted)");
  analyze->add_option("--mode", mode, "at | around")->check(CLI::IsMember({"at", "around"}))->capture_default_str();
  analyze->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  std::string method = "ssn", x0s, y0s;
  double tol = 1e-12;
  int max_iter = 50;
  std::optional<std::string> trace_path;
  auto* solve = app.add_subcommand("solve", "Run a Newton-type solver and export its trace");
  solve->add_option("problem", path, "Problem file (JSON)")->required();
  solve->add_option("--method", method, "ssn | newton")->check(CLI::IsMember({"ssn", "newton"}))->capture_default_str();
  solve->add_option("--x0", x0s, "Start x, comma-separated")->required();
  solve->add_option("--y0", y0s, "Start y, comma-separated")->required();
  solve->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--max-iter", max_iter, "Iteration limit")->check(CLI::NonNegativeNumber)->capture_default_str();
  solve->add_option("--trace", trace_path, "Write the iteration trace as CSV");

  int samples = 2000;
  unsigned long long seed = 42;
  auto* verify = app.add_subcommand("verify", "Compare analytic results with brute-force oracles");
  verify->add_option("problem", path, "Problem file (JSON)")->required();
  verify->add_option("--x", xs, "Point x, comma-separated");
  verify->add_option("--y", ys, "Multiplier y, comma-separated");
  verify->add_option("--point", point, "Named point of the problem file (default xbar when --x is omitted)");
  verify->add_option("--samples", samples, "Probes per tangent cone")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--seed", seed, "Random seed")->capture_default_str();

  std::string experiment;
  std::optional<std::string> exp_method, exp_out, exp_x, exp_y;
  int grid_points = 10, exp_samples = 20;
  double radius = 0.1;
  unsigned long long exp_seed = 7;
  auto* exp = app.add_subcommand("experiment", "Start-point sweeps: critical-attraction | superlinear");
  exp->add_option("name", experiment, "Experiment name")->required();
  exp->add_option("problem", path, "Problem file (JSON)")->required();
  exp->add_option("--method", exp_method, "ssn | newton")->check(CLI::IsMember({"ssn", "newton"}));
  exp->add_option("--x", exp_x, "Reference point x, comma-separated");
  exp->add_option("--y", exp_y, "Reference multiplier y, comma-separated");
  exp->add_option("--grid", grid_points, "Grid points per side")->capture_default_str();
  exp->add_option("--samples", exp_samples, "Number of random starts")->capture_default_str();
  exp->add_option("--radius", radius, "Start-ball radius")->capture_default_str();
  exp->add_option("--seed", exp_seed, "Random seed")->capture_default_str();
  exp->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  exp->add_option("--max-iter", max_iter, "Iteration limit")->check(CLI::NonNegativeNumber)->capture_default_str();
  exp->add_option("--out", exp_out, "Write the CSV table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*analyze) return cmd_analyze(path, point, xs, ys, mode, format);
  if (*solve) return cmd_solve(path, method, x0s, y0s, tol, max_iter, trace_path);
  if (*verify) return cmd_verify(path, point, xs, ys, samples, seed);
  Json options = {{"grid_points", grid_points}, {"samples", exp_samples}, {"radius", radius},
                  {"seed", exp_seed},           {"tol", tol},             {"max_iter", max_iter}};
  if (exp_method) options["method"] = *exp_method;
  for (const auto& [flag, text] : {std::pair{"x", exp_x}, std::pair{"y", exp_y}}) {
    if (!text) continue;
    const auto v = parse_list(*text);
    if (!v) {
      std::cerr << "error: --" << flag << " expects comma-separated numbers\n";
      return kUsage;
    }
    options[flag] = *v;
  }
  return cmd_experiment(experiment, path, options, exp_out);
}
