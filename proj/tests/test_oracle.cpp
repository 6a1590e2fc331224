#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "expr.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace polycrit;
using testing::vec;

namespace {

Polyhedron nonpos_orthant() {
  return {Mat(0, 2), Vec(0), Mat::Identity(2, 2), Vec::Zero(2)};
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("sampled tangents of the nonpositive orthant") {
    const SetOracle o = polyhedron_oracle(nonpos_orthant());
    CHECK(sample_tangent(o, vec({0, 0}), vec({-1, -1}), ConeKind::T));
    CHECK_FALSE(sample_tangent(o, vec({0, 0}), vec({1, 1}), ConeKind::T));
    CHECK_FALSE(sample_tangent(o, vec({0, 0}), vec({1, -1}), ConeKind::T));
    // Nearby interior bases admit every direction.
    CHECK(sample_tangent(o, vec({0, 0}), vec({1, 1}), ConeKind::Tsharp));
    CHECK(sample_tangent(o, vec({0, 0}), vec({0, 0}), ConeKind::T));
    try {
      sample_tangent(o, vec({1, 0}), vec({1, 0}), ConeKind::T);
      FAIL("expected BaseNotInSet");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotInSet);
      CHECK(std::string(errc_name(e.code())) == "BaseNotInSet");
    }
  }

  TEST_CASE("sampled tangents of a graph") {
    const SetOracle o = graph_oracle({GPiece::nonpos()});
    CHECK(sample_tangent(o, vec({0, 0}), vec({-1, 0}), ConeKind::T));
    CHECK(sample_tangent(o, vec({0, 0}), vec({0, 1}), ConeKind::T));
    CHECK_FALSE(sample_tangent(o, vec({0, 0}), vec({1, 0}), ConeKind::T));
    CHECK(sample_tangent(o, vec({0, 0}), vec({1, 0}), ConeKind::Tsharp));
    CHECK_FALSE(sample_tangent(o, vec({0, 0}), vec({1, 1}), ConeKind::Tsharp));
  }

  TEST_CASE("seeded sampling is deterministic") {
    const SetOracle o = polyhedron_oracle(nonpos_orthant());
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
      const Vec d = testing::random_unit(2, rng);
      CHECK(sample_tangent(o, vec({-1, 0}), d, ConeKind::Tsharp) == sample_tangent(o, vec({-1, 0}), d, ConeKind::Tsharp));
    }
  }

  TEST_CASE("grid search for critical multipliers") {
    const auto ce = grid_critical_search(testing::data_problem("crit_eq.json"), vec({0}));
    REQUIRE(ce.has_value());
    CHECK(std::abs(ce->y(0) + 1) <= 0.01);
    CHECK(std::abs(ce->dx(0)) == doctest::Approx(1));
    CHECK_FALSE(grid_critical_search(testing::data_problem("example54.json"), vec({0, 0})).has_value());
    const CompositeProblem id = testing::make_problem(2, "0.5*x1^2 + 0.5*x2^2", {}, {});
    CHECK_FALSE(grid_critical_search(id, vec({0, 0})).has_value());
  }

  TEST_CASE("grid helpers") {
    const auto sphere = sup_sphere_grid(2, 5);
    CHECK(sphere.size() == 16);
    for (const Vec& d : sphere) CHECK(d.lpNorm<Eigen::Infinity>() == 1);
    const auto ys = multiplier_grid(testing::data_problem("example54.json"), vec({0, 0}), {});
    // Step 0.01 along the unit null direction of the segment from (1,0) to (0,1).
    CHECK(ys.size() == 141);
    const Vec z = nnls(testing::mat(2, 2, {1, 0, 0, 1}), vec({1, -1}));
    CHECK(z(0) == doctest::Approx(1));
    CHECK(z(1) == 0);
  }

  TEST_CASE("finite difference checks") {
    CHECK(fd_check(Expr::parse("x1^2", 1), vec({3})) <= 1e-8);
    CHECK(fd_check(Expr::parse("0.5*x1^2 + 0.5*(x2+1)^2", 2), vec({0.2, -0.1})) <= 1e-6);
    CHECK(fd_check(Expr::parse("exp(x1)", 1), vec({0})) <= 1e-6);
    try {
      fd_check(Expr::parse("log(x1)", 1), vec({-1}));
      FAIL("expected DomainError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Domain);
    }
  }
}
