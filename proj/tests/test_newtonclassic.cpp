#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "ssnewton.hpp"
#include "support.hpp"

using namespace polycrit;
using testing::vec;

TEST_SUITE("newtonclassic") {
  TEST_CASE("critical toy recursion") {
    const SolveTrace t = newton_kkt(testing::data_problem("crit_eq.json"), vec({1}), vec({0}));
    REQUIRE(t.iters.size() >= 21);
    for (size_t k = 0; k < t.iters.size(); ++k) {
      CHECK(t.iters[k].x(0) == doctest::Approx(std::ldexp(1.0, -static_cast<int>(k))).epsilon(1e-9));
      CHECK(std::abs(t.iters[k].y(0) + 1) <= std::ldexp(1.0, -static_cast<int>(k)) * (1 + 1e-9));
    }
    for (double r : t.step_ratios()) CHECK(r == doctest::Approx(0.5).epsilon(1e-9));
  }

  TEST_CASE("quadratic decrease at a noncritical solution") {
    const SolveTrace t = newton_kkt(testing::data_problem("eq_noncrit.json"), vec({0.3, 0.3}), vec({0.2}));
    CHECK(t.status == SolveStatus::Solved);
    CHECK(t.newton_steps <= 8);
    for (size_t k = 0; k + 1 < t.iters.size(); ++k)
      if (t.iters[k].rho() <= 0.1) CHECK(t.iters[k + 1].rho() <= 5 * t.iters[k].rho() * t.iters[k].rho());
    CHECK(t.last().x.norm() <= 1e-12);
  }

  TEST_CASE("start at a KKT point") {
    const SolveTrace t = newton_kkt(testing::data_problem("eq_noncrit.json"), vec({0, 0}), vec({0}));
    CHECK(t.status == SolveStatus::Solved);
    CHECK(t.newton_steps == 0);
  }

  TEST_CASE("inequality pieces are refused") {
    try {
      newton_kkt(testing::data_problem("ineq_toy.json"), vec({0}), vec({0}));
      FAIL("expected NotEqualityOnly");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotEqualityOnly);
    }
  }
}
