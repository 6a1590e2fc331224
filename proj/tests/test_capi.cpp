#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "polycrit/polycrit.h"

namespace {

std::string data(const char* name) { return std::string(POLYCRIT_DATA_DIR) + "/" + name; }

pcrit_problem* load(const char* name) {
  pcrit_problem* p = nullptr;
  REQUIRE(pcrit_problem_load(data(name).c_str(), &p) == PCRIT_OK);
  return p;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  pcrit_free_string(s);
  return out;
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("problem handles") {
    pcrit_problem* p = load("example54.json");
    CHECK(pcrit_problem_n(p) == 2);
    CHECK(pcrit_problem_m(p) == 2);
    CHECK(pcrit_problem_equality_only(p) == 0);
    double x[2] = {9, 9}, y[2];
    int has_y = -1;
    CHECK(pcrit_problem_point(p, "xbar", x, y, &has_y) == PCRIT_OK);
    CHECK(x[0] == 0);
    CHECK(has_y == 0);
    CHECK(pcrit_problem_point(p, "missing", x, y, &has_y) == PCRIT_INVALID_ARGUMENT);
    double rg = -1, rh = -1;
    const double y1[2] = {1, 0};
    CHECK(pcrit_residual(p, x, y1, &rg, &rh) == PCRIT_OK);
    CHECK(rg == 0);
    CHECK(rh == 0);
    pcrit_problem_free(p);
  }

  TEST_CASE("error codes and messages") {
    pcrit_problem* p = nullptr;
    CHECK(pcrit_problem_load(data("does_not_exist.json").c_str(), &p) == PCRIT_IO_ERROR);
    CHECK(std::string(pcrit_last_error()).size() > 0);
    CHECK(pcrit_problem_parse("{\"schema\":1,\"n\":1,\"m\":1,\"f0\":\"x1\",\"F\":[\"x1\"],\"g\":[{\"kind\":\"bogus\"}]}",
                              &p) == PCRIT_SCHEMA_ERROR);
    CHECK(pcrit_problem_parse("{\"schema\":1,\"n\":1,\"m\":0,\"f0\":\"x1 +\",\"F\":[],\"g\":[]}", &p) ==
          PCRIT_SCHEMA_ERROR);
    CHECK(std::string(pcrit_last_error()).find("f0") != std::string::npos);
    CHECK(pcrit_problem_parse("not json", &p) == PCRIT_SCHEMA_ERROR);
    CHECK(p == nullptr);
    CHECK(std::string(pcrit_status_name(PCRIT_BASE_NOT_IN_SET)) == "BaseNotInSet");
    CHECK(pcrit_problem_parse("{\"schema\":1,\"n\":1,\"m\":0,\"f0\":\"x1^2\",\"F\":[],\"g\":[]}", &p) == PCRIT_OK);
    CHECK(std::string(pcrit_last_error()).empty());
    pcrit_problem_free(p);
  }

  TEST_CASE("analysis through the C interface") {
    pcrit_problem* p = load("example54.json");
    const double x[2] = {0, 0}, y[2] = {1, 0};
    char* out = nullptr;
    int inconclusive = -1;
    REQUIRE(pcrit_analyze(p, x, nullptr, PCRIT_MODE_AT, PCRIT_FORMAT_JSON, &out, &inconclusive) == PCRIT_OK);
    const auto j = nlohmann::json::parse(take(out));
    CHECK(j["cq"]["holds"] == true);
    CHECK(inconclusive == 0);
    REQUIRE(pcrit_analyze(p, x, y, PCRIT_MODE_AT, PCRIT_FORMAT_TEXT, &out, &inconclusive) == PCRIT_OK);
    CHECK(take(out).find("No") != std::string::npos);
    const double bad[2] = {1, 0};
    CHECK(pcrit_analyze(p, bad, nullptr, PCRIT_MODE_AT, PCRIT_FORMAT_TEXT, &out, &inconclusive) ==
          PCRIT_NOT_STATIONARY);
    pcrit_problem_free(p);
  }

  TEST_CASE("solving through the C interface") {
    pcrit_problem* p = load("crit_eq.json");
    const double x0[1] = {1}, y0[1] = {0};
    pcrit_solver_options o = pcrit_solver_options_default();
    pcrit_trace* t = nullptr;
    REQUIRE(pcrit_solve(p, PCRIT_METHOD_NEWTON, x0, y0, &o, &t) == PCRIT_OK);
    CHECK(pcrit_trace_status(t) == PCRIT_SOLVED);
    CHECK(pcrit_trace_newton_steps(t) == 21);
    CHECK(pcrit_trace_length(t) == 22);
    double x[1], y[1], rg, rh;
    REQUIRE(pcrit_trace_iterate(t, 3, x, y, &rg, &rh) == PCRIT_OK);
    CHECK(x[0] == doctest::Approx(0.125));
    CHECK(y[0] == doctest::Approx(-0.875));
    CHECK(pcrit_trace_iterate(t, 99, x, y, &rg, &rh) == PCRIT_INVALID_ARGUMENT);
    char* s = nullptr;
    REQUIRE(pcrit_trace_summary(t, &s) == PCRIT_OK);
    const auto j = nlohmann::json::parse(take(s));
    CHECK(j["step_ratios"].back().get<double>() == doctest::Approx(0.5));
    REQUIRE(pcrit_trace_csv(t, &s) == PCRIT_OK);
    CHECK(take(s).rfind("iter,x1,y1,", 0) == 0);
    pcrit_trace_free(t);
    pcrit_problem* q = load("example54.json");
    const double qx[2] = {0, 0}, qy[2] = {0, 0};
    CHECK(pcrit_solve(q, PCRIT_METHOD_NEWTON, qx, qy, &o, &t) == PCRIT_NOT_EQUALITY_ONLY);
    o.beta = 0.5;
    CHECK(pcrit_solve(p, PCRIT_METHOD_SSN, x0, y0, &o, &t) == PCRIT_INVALID_ARGUMENT);
    pcrit_problem_free(q);
    pcrit_problem_free(p);
  }

  TEST_CASE("verify and experiments through the C interface") {
    pcrit_problem* p = load("crit_eq.json");
    const double x[1] = {0};
    char* rep = nullptr;
    int passed = -1;
    REQUIRE(pcrit_verify(p, x, nullptr, 200, 42, &rep, &passed) == PCRIT_OK);
    CHECK(passed == 1);
    CHECK(nlohmann::json::parse(take(rep)).is_object());
    char *csv = nullptr, *sum = nullptr;
    REQUIRE(pcrit_experiment(p, "critical-attraction", "{\"grid_points\": 4}", &csv, &sum, &passed) == PCRIT_OK);
    CHECK(passed == 1);
    CHECK(nlohmann::json::parse(take(sum))["runs"] == 16);
    take(csv);
    CHECK(pcrit_experiment(p, "nope", nullptr, &csv, &sum, &passed) == PCRIT_UNKNOWN_EXPERIMENT);
    pcrit_problem_free(p);
  }
}
