#include <cmath>
#include <random>

#include "criticality.hpp"
#include "doctest.h"
#include "error.hpp"
#include "independent.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace polycrit;
using testing::vec;

namespace {

void check_witness(const CompositeProblem& p, const Vec& x, const Vec& y, const DirectionPD& w, ConeKind kind) {
  CHECK(w.dx.lpNorm<Eigen::Infinity>() >= 0.5);
  const Mat H = lagrangian_xderivs(p, x, y).hessxx;
  const Evaluation ev = evaluate(p, x);
  CHECK((H * w.dx + ev.jac.transpose() * w.dy).norm() <= 1e-8);
  const DirectionPD full{Vec::Zero(p.n), Vec::Zero(p.m), w.dx, w.dy};
  CHECK(tangent_gph_M1(p, {x, y}, Params::zero(p.n, p.m), full, kind, 1e-8));
}

}  // namespace

TEST_SUITE("criticality") {
  TEST_CASE("noncriticality examples") {
    const CompositeProblem ce = testing::data_problem("crit_eq.json");
    const CriticalityVerdict c = check_noncritical(ce, vec({0}), vec({-1}), DerivKind::Graphical);
    CHECK(c.status == CritStatus::Critical);
    REQUIRE(c.witness.has_value());
    CHECK(std::abs(c.witness->dx(0)) == doctest::Approx(1));
    CHECK(c.witness->dy(0) == doctest::Approx(0));
    CHECK(check_noncritical(ce, vec({0}), vec({0}), DerivKind::Graphical).status == CritStatus::Noncritical);
    const CompositeProblem e54 = testing::data_problem("example54.json");
    for (const Vec& y : {vec({1, 0}), vec({0, 1})})
      for (DerivKind k : {DerivKind::Graphical, DerivKind::Limiting})
        CHECK(check_noncritical(e54, vec({0, 0}), y, k).status == CritStatus::Noncritical);
    try {
      check_noncritical(e54, vec({0, 0}), vec({2, 0}), DerivKind::Graphical);
      FAIL("expected NotAMultiplier");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotAMultiplier);
    }
  }

  TEST_CASE("uniqueness condition examples") {
    const CompositeProblem e54 = testing::data_problem("example54.json");
    const UniquenessResult u = check_uniqueness_cond(e54, vec({0, 0}), vec({1, 0}), DerivKind::Graphical);
    CHECK_FALSE(u.holds);
    REQUIRE(u.witness.has_value());
    CHECK((*u.witness)(0) == doctest::Approx(-(*u.witness)(1)));
    CHECK((*u.witness)(0) < 0);
    const CompositeProblem it = testing::data_problem("ineq_toy.json");
    const CompositeProblem en = testing::data_problem("eq_noncrit.json");
    for (DerivKind k : {DerivKind::Graphical, DerivKind::Limiting}) {
      CHECK(check_uniqueness_cond(it, vec({0}), vec({1}), k).holds);
      CHECK(check_uniqueness_cond(en, vec({0, 0}), vec({0}), k).holds);
    }
  }

  TEST_CASE("isolated calmness of M1") {
    const CompositeProblem e54 = testing::data_problem("example54.json");
    const ICVerdict v = verdict_ic_M1(e54, vec({0, 0}), vec({1, 0}), Mode::At);
    CHECK(v.answer == IcAnswer::No);
    REQUIRE(v.witness.has_value());
    REQUIRE(v.witness->dy.has_value());
    CHECK((*v.witness->dy)(0) == doctest::Approx(-(*v.witness->dy)(1)));
    const CompositeProblem it = testing::data_problem("ineq_toy.json");
    for (Mode m : {Mode::At, Mode::Around}) CHECK(verdict_ic_M1(it, vec({0}), vec({1}), m).answer == IcAnswer::Yes);
    const ICVerdict c = verdict_ic_M1(testing::data_problem("crit_eq.json"), vec({0}), vec({-1}), Mode::At);
    CHECK(c.answer == IcAnswer::No);
    REQUIRE(c.witness.has_value());
    REQUIRE(c.witness->dx.has_value());
    CHECK(std::abs((*c.witness->dx)(0)) == doctest::Approx(1));
  }

  TEST_CASE("isolated calmness of M") {
    const ICVerdict e = verdict_ic_M(testing::data_problem("example54.json"), vec({0, 0}), Mode::At);
    CHECK(e.answer == IcAnswer::Yes);
    CHECK(e.path == ProofPath::ExactConstantH);
    CHECK(e.assumptions.polyhedral_ic_automatic);
    const ICVerdict c = verdict_ic_M(testing::data_problem("crit_eq.json"), vec({0}), Mode::At);
    CHECK(c.answer == IcAnswer::No);
    REQUIRE(c.witness.has_value());
    CHECK((*c.witness->y)(0) == doctest::Approx(-1));
    CHECK(std::abs((*c.witness->dx)(0)) == doctest::Approx(1));
    const CompositeProblem fr = testing::make_problem(2, "x1^2 + x1*x2 + x2^2", {"x1", "x2"}, {GPiece::free(), GPiece::free()});
    for (Mode m : {Mode::At, Mode::Around}) CHECK(verdict_ic_M(fr, vec({0, 0}), m).answer == IcAnswer::Yes);
    CHECK_THROWS_AS(verdict_ic_M(fr, vec({1, 0}), Mode::At), Error);
    const CompositeProblem l0 = testing::make_problem(1, "0.5*x1^2", {"x1"}, {GPiece::l0(1)});
    CHECK(verdict_ic_M(l0, vec({0}), Mode::At).answer == IcAnswer::Inconclusive);
  }

  TEST_CASE("critical multiplier search") {
    const CriticalSearch ce = search_critical_multiplier(testing::data_problem("crit_eq.json"), vec({0}),
                                                         DerivKind::Graphical);
    REQUIRE(ce.witness.has_value());
    CHECK(std::abs(ce.witness->y(0) + 1) <= 1e-9);
    CHECK(ce.path != ProofPath::HeuristicSearch);
    const CriticalSearch e = search_critical_multiplier(testing::data_problem("example54.json"), vec({0, 0}),
                                                        DerivKind::Graphical);
    CHECK_FALSE(e.witness.has_value());
    CHECK(e.path == ProofPath::ExactConstantH);
    CHECK(e.exhaustive);
    // Strictly convex QP with linear constraints.
    const CompositeProblem qp = testing::make_problem(2, "x1^2 + x2^2 + x1*x2 - x1 - x2", {"x1 + x2", "x1 - x2"},
                                                      {GPiece::nonpos(), GPiece::nonpos()});
    CHECK_FALSE(search_critical_multiplier(qp, vec({0, 0}), DerivKind::Graphical).witness.has_value());
  }

  TEST_CASE("Aubin criterion for M1") {
    CHECK(check_aubin_M1(testing::data_problem("ineq_toy.json"), vec({0}), vec({1})));
    CHECK_FALSE(check_aubin_M1(testing::data_problem("crit_eq.json"), vec({0}), vec({-1})));
    const CompositeProblem m0 = testing::make_problem(2, "x1^2 + x2^2", {}, {});
    CHECK(check_aubin_M1(m0, vec({0, 0}), Vec(0)));
  }

  TEST_CASE("decomposition identity and witness replay") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 50; ++k) {
      const testing::Instance inst = testing::random_stationary_instance(rng, 3, 3);
      const ICVerdict v = verdict_ic_M1(inst.p, inst.x, inst.y, Mode::At);
      const bool expect = testing::independent_noncritical(inst.p, inst.x, inst.y, ConeKind::T) &&
                          testing::independent_uniqueness(inst.p, inst.x, inst.y, ConeKind::T);
      REQUIRE(v.answer != IcAnswer::Inconclusive);
      CHECK((v.answer == IcAnswer::Yes) == expect);
      for (DerivKind kind : {DerivKind::Graphical, DerivKind::Limiting}) {
        const CriticalityVerdict c = check_noncritical(inst.p, inst.x, inst.y, kind);
        if (c.status == CritStatus::Critical) check_witness(inst.p, inst.x, inst.y, *c.witness, cone_kind(kind));
      }
    }
  }

  TEST_CASE("limiting noncriticality implies graphical noncriticality") {
    std::mt19937_64 rng(32);
    for (int k = 0; k < 100; ++k) {
      const testing::Instance inst = testing::random_stationary_instance(rng, 3, 3);
      const CritStatus lim = check_noncritical(inst.p, inst.x, inst.y, DerivKind::Limiting).status;
      const CritStatus gra = check_noncritical(inst.p, inst.x, inst.y, DerivKind::Graphical).status;
      if (lim == CritStatus::Noncritical) CHECK(gra == CritStatus::Noncritical);
    }
  }

  TEST_CASE("agreement with the grid search at the given multiplier") {
    std::mt19937_64 rng(33);
    for (int k = 0; k < 30; ++k) {
      const testing::Instance inst = testing::random_stationary_instance(rng, 2, 2);
      CAPTURE(k);
      const bool crit = check_noncritical(inst.p, inst.x, inst.y, DerivKind::Graphical).status == CritStatus::Critical;
      const bool grid = grid_critical_search(inst.p, inst.x, {}, 1e-6, DerivKind::Graphical, inst.y).has_value();
      CHECK(crit == grid);
    }
  }
}
