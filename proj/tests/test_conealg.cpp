#include <random>

#include "doctest.h"
#include "error.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace polycrit;
using testing::cone;
using testing::vec;

namespace {

Polyhedron nonpos_orthant() {
  Polyhedron p;
  p.eq = Mat(0, 2);
  p.eq_rhs = Vec(0);
  p.ineq = Mat::Identity(2, 2);
  p.ineq_rhs = Vec::Zero(2);
  return p;
}

ConeUnion single(const PolyhedralCone& c) { return ConeUnion(c.dim(), {c}); }

PolyhedralCone random_cone(int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-2, 2);
  const int e = static_cast<int>(rng() % 2), a = 1 + static_cast<int>(rng() % 3);
  Mat E(e, k), A(a, k);
  for (int r = 0; r < e; ++r)
    for (int c = 0; c < k; ++c) E(r, c) = coef(rng);
  for (int r = 0; r < a; ++r)
    for (int c = 0; c < k; ++c) A(r, c) = coef(rng);
  return PolyhedralCone(E, A);
}

}  // namespace

TEST_SUITE("conealg") {
  TEST_CASE("membership in unions") {
    const ConeUnion u(2, {cone(2, {}, {{0, 1}}), cone(2, {}, {{1, 0}})});
    CHECK(u.contains(vec({1, -1})));
    CHECK_FALSE(u.contains(vec({1, 1})));
    CHECK(u.contains(vec({0, 0})));
    CHECK_THROWS_AS(u.contains(vec({1, 1, 1})), Error);
  }

  TEST_CASE("tangent cones of the nonpositive orthant") {
    const Polyhedron P = nonpos_orthant();
    CHECK(testing::same_set(single(tangent_polyhedron(P, vec({0, 0}))), single(cone(2, {}, {{1, 0}, {0, 1}})), 4000,
                            1));
    CHECK(testing::same_set(single(tangent_polyhedron(P, vec({-1, 0}))), single(cone(2, {}, {{0, 1}})), 4000, 2));
    CHECK(testing::same_set(single(tangent_polyhedron(P, vec({-1, -1}))), single(PolyhedralCone::whole(2)), 4000, 3));
    CHECK_THROWS_AS(tangent_polyhedron(P, vec({1, 0})), Error);
  }

  TEST_CASE("limiting tangent cones of polyhedra") {
    const Polyhedron P = nonpos_orthant();
    CHECK(testing::same_set(limiting_tangent_polyhedron(P, vec({-1, 0})), single(PolyhedralCone::whole(2)), 4000, 4));
    // Interior points approach the origin, so T# of the orthant at 0 is the whole plane.
    CHECK(limiting_tangent_polyhedron(P, vec({0, 0})).contains(vec({1, 1})));
    Polyhedron line;
    line.eq = testing::mat(1, 3, {1, -1, 0});
    line.eq_rhs = Vec::Zero(1);
    line.ineq = Mat(0, 3);
    line.ineq_rhs = Vec(0);
    CHECK(testing::same_set(limiting_tangent_polyhedron(line, vec({2, 2, 5})), single(cone(3, {{1, -1, 0}}, {})),
                            4000, 5));
    CHECK_THROWS_AS(limiting_tangent_polyhedron(P, vec({0.5, 0})), Error);
  }

  TEST_CASE("polars") {
    const auto polar_of = [](const PolyhedralCone& c) { return single(polar(c)); };
    CHECK(testing::same_set(polar_of(cone(2, {}, {{1, 0}, {0, 1}})), single(cone(2, {}, {{-1, 0}, {0, -1}})), 4000, 6));
    CHECK(testing::same_set(polar_of(cone(2, {{0, 1}}, {})), single(cone(2, {{1, 0}}, {})), 4000, 7));
    CHECK(testing::same_set(polar_of(PolyhedralCone::origin(2)), single(PolyhedralCone::whole(2)), 4000, 8));
  }

  TEST_CASE("nonzero feasibility") {
    CHECK_FALSE(lp_feasible_nonzero(cone(2, {{1, 0}}, {}), {0}).has_value());
    const auto w1 = lp_feasible_nonzero(cone(2, {}, {{1, 0}, {0, 1}}), {0});
    REQUIRE(w1.has_value());
    CHECK((*w1 - vec({-1, 0})).norm() < 1e-12);
    const auto w2 = lp_feasible_nonzero(cone(2, {{1, -1}}, {{-1, 0}}), {1});
    REQUIRE(w2.has_value());
    CHECK((*w2 - vec({1, 1})).norm() < 1e-12);
  }

  TEST_CASE("double polar is the identity") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
      const int dim = 2 + static_cast<int>(rng() % 3);
      const PolyhedralCone c = random_cone(dim, rng);
      CHECK(testing::same_set(single(polar(polar(c))), single(c), 500, 100 + k));
    }
  }

  TEST_CASE("nonzero feasibility agrees with generator enumeration") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 200; ++k) {
      const int dim = 2 + static_cast<int>(rng() % 3);
      const PolyhedralCone c = random_cone(dim, rng);
      std::vector<int> coords;
      for (int j = 0; j < dim; ++j)
        if (rng() % 2) coords.push_back(j);
      if (coords.empty()) coords.push_back(0);
      bool brute = false;
      for (const Vec& g : testing::union_generators(single(c)))
        for (int j : coords) brute = brute || std::abs(g(j)) > 1e-9;
      const auto w = lp_feasible_nonzero(c, coords);
      CHECK(w.has_value() == brute);
      if (w) CHECK(c.contains(*w, 1e-9));
    }
  }

  TEST_CASE("tangent cone lies in the limiting tangent cone") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> coef(-1, 1);
    for (int k = 0; k < 50; ++k) {
      Polyhedron P;
      const int dim = 2 + static_cast<int>(rng() % 2), rows = 2 + static_cast<int>(rng() % 3);
      P.eq = Mat(0, dim);
      P.eq_rhs = Vec(0);
      P.ineq = Mat(rows, dim);
      P.ineq_rhs = Vec::Zero(rows);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < dim; ++c) P.ineq(r, c) = coef(rng);
      const Vec x = Vec::Zero(dim);
      CHECK(includes(limiting_tangent_polyhedron(P, x), single(tangent_polyhedron(P, x))));
    }
  }

  TEST_CASE("membership agrees with the sampling oracle") {
    std::mt19937_64 rng(14);
    int agree = 0, total = 0;
    for (int k = 0; k < 20; ++k) {
      const PolyhedralCone c = random_cone(2 + static_cast<int>(rng() % 2), rng);
      Polyhedron P{c.eq, Vec::Zero(c.eq.rows()), c.ineq, Vec::Zero(c.ineq.rows())};
      if (P.ineq.rows() == 0) P.ineq = Mat(0, c.dim());
      const SetOracle oracle = polyhedron_oracle(P);
      SampleParams sp;
      sp.samples = 16;
      for (int s = 0; s < 50; ++s) {
        const Vec d = testing::random_unit(c.dim(), rng);
        agree += c.contains(d, 1e-8) == sample_tangent(oracle, Vec::Zero(c.dim()), d, ConeKind::T, sp);
        ++total;
      }
    }
    CHECK(agree >= 0.99 * total);
  }
}
