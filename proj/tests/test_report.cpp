#include <random>

#include "doctest.h"
#include "error.hpp"
#include "experiments.hpp"
#include "report.hpp"
#include "support.hpp"

using namespace polycrit;
using testing::vec;

TEST_SUITE("report") {
  TEST_CASE("biactive example report") {
    const AnalysisReport r = analyze(testing::data_problem("example54.json"), vec({0, 0}), std::nullopt, Mode::At);
    CHECK(r.stationary);
    CHECK(r.cq.holds);
    CHECK(r.vertices.size() == 2);
    CHECK_FALSE(r.critical.has_value());
    REQUIRE_FALSE(r.verdicts.empty());
    CHECK(r.verdicts.back().target == IcTarget::MAt);
    CHECK(r.verdicts.back().answer == IcAnswer::Yes);
    for (const auto& row : r.multipliers) CHECK(row.graphical.status == CritStatus::Noncritical);
    CHECK(to_text(r).find("Yes") != std::string::npos);
  }

  TEST_CASE("reports survive a JSON round trip") {
    std::mt19937_64 rng(51);
    for (int k = 0; k < 30; ++k) {
      const testing::Instance inst = testing::random_stationary_instance(rng, 3, 3);
      for (Mode mode : {Mode::At, Mode::Around}) {
        const AnalysisReport r = analyze(inst.p, inst.x, k % 2 ? std::optional<Vec>(inst.y) : std::nullopt, mode);
        const Json j = to_json(r);
        CHECK(report_from_json(j) == r);
        CHECK(to_json(report_from_json(Json::parse(j.dump()))) == j);
      }
    }
  }

  TEST_CASE("analysis errors") {
    const CompositeProblem p = testing::data_problem("example54.json");
    try {
      analyze(p, vec({1, 0}), std::nullopt, Mode::At);
      FAIL("expected NotStationary");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotStationary);
    }
    try {
      analyze(p, vec({0, 0}), vec({3, 0}), Mode::At);
      FAIL("expected NotAMultiplier");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotAMultiplier);
    }
    CHECK_THROWS_AS(report_from_json(Json{{"schema", 7}}), Error);
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("verify suites pass on the data problems") {
    VerifyOptions o;
    o.samples = 500;
    CHECK(verify_instance(testing::data_problem("example54.json"), vec({0, 0}), std::nullopt, o).passed);
    CHECK(verify_instance(testing::data_problem("crit_eq.json"), vec({0}), std::nullopt, o).passed);
    CHECK(verify_instance(testing::data_problem("ineq_toy.json"), vec({0}), vec({1}), o).passed);
  }

  TEST_CASE("critical attraction") {
    const ExperimentResult r = run_experiment("critical-attraction", testing::data_problem("crit_eq.json"));
    CHECK(r.passed);
    CHECK(r.summary["fraction"].get<double>() >= 0.9);
  }

  TEST_CASE("superlinear starts") {
    const ExperimentResult r = run_experiment("superlinear", testing::data_problem("eq_noncrit.json"));
    CHECK(r.passed);
    CHECK(std::count(r.csv.begin(), r.csv.end(), '\n') == 21);
  }

  TEST_CASE("unknown experiments and solvers") {
    try {
      run_experiment("nope", testing::data_problem("crit_eq.json"));
      FAIL("expected UnknownExperiment");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownExperiment);
    }
    CHECK_THROWS_AS(run_solver("bfgs", testing::data_problem("crit_eq.json"), vec({1}), vec({0}), {}), Error);
  }
}
