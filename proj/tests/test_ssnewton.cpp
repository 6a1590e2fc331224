#include <cmath>
#include <random>

#include "criticality.hpp"
#include "doctest.h"
#include "error.hpp"
#include "ssnewton.hpp"
#include "support.hpp"

using namespace polycrit;
using testing::vec;

namespace {

bool same_trace(const SolveTrace& a, const SolveTrace& b, double tol) {
  if (a.iters.size() != b.iters.size() || a.status != b.status) return false;
  for (size_t k = 0; k < a.iters.size(); ++k)
    if ((a.iters[k].x - b.iters[k].x).lpNorm<Eigen::Infinity>() > tol ||
        (a.iters[k].y - b.iters[k].y).lpNorm<Eigen::Infinity>() > tol)
      return false;
  return true;
}

}  // namespace

TEST_SUITE("ssnewton") {
  TEST_CASE("approximation step") {
    const CompositeProblem ce = testing::data_problem("crit_eq.json");
    const ApproxPoint a = approx_step(ce, vec({0.5}), vec({0.3}));
    CHECK(a.y(0) == 0.3);
    CHECK(a.u(0) == doctest::Approx(-0.25));
    CHECK(a.v(0) == doctest::Approx(2 * 0.5 + 2 * 0.3 * 0.5));
    CHECK(a.branch.p[0] == 0);
    CHECK(a.branch.q[0] == 1);

    const CompositeProblem p = testing::make_problem(1, "0.5*x1^2", {"x1 - 1"}, {GPiece::nonpos()});
    const ApproxPoint b = approx_step(p, vec({0}), vec({0.2}));
    CHECK(b.y(0) == 0);
    CHECK(b.u(0) == 0);
    CHECK(b.branch.piece[0] == 0);
    CHECK(b.branch.p[0] == 1);
    CHECK(b.branch.q[0] == 0);
    CHECK(b.shift == doctest::Approx(0.2));

    const CompositeProblem it = testing::data_problem("ineq_toy.json");
    const ApproxPoint c = approx_step(it, vec({0}), vec({1}));
    CHECK(c.v.norm() == 0);
    CHECK(c.u.norm() == 0);
    CHECK(c.shift == 0);
  }

  TEST_CASE("approximation points lie on the graph") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 100; ++k) {
      const testing::Instance inst = testing::random_stationary_instance(rng, 3, 3);
      Vec x(inst.p.n), y(inst.p.m);
      for (int j = 0; j < x.size(); ++j) x(j) = normal(rng);
      for (int j = 0; j < y.size(); ++j) y(j) = normal(rng);
      const ApproxPoint a = approx_step(inst.p, x, y);
      const Residual r = residual(inst.p, {a.x, a.y}, {a.v, a.u});
      CHECK(r.grad <= 1e-12);
      CHECK(r.graph <= 1e-12);
    }
  }

  TEST_CASE("Newton system assembly") {
    const CompositeProblem ce = testing::data_problem("crit_eq.json");
    const ApproxPoint a = approx_step(ce, vec({0.5}), vec({0.3}));
    const NewtonSystem s = assemble_newton_system(ce, a);
    const Mat H = lagrangian_xderivs(ce, a.x, a.y).hessxx;
    CHECK(s.A(0, 0) == doctest::Approx(H(0, 0)));
    CHECK(s.A(0, 1) == doctest::Approx(1.0));
    CHECK(s.A(1, 0) == doctest::Approx(1.0));
    CHECK(s.A(1, 1) == 0);
    CHECK(s.rhs(0) == doctest::Approx(-a.v(0)));
    CHECK(s.rhs(1) == doctest::Approx(a.u(0)));

    const CompositeProblem it = testing::data_problem("ineq_toy.json");
    const NewtonSystem v = assemble_newton_system(it, approx_step(it, vec({0.1}), vec({0.5})));
    CHECK(v.A(1, 0) == doctest::Approx(1.0));
    CHECK(v.A(1, 1) == 0);

    const CompositeProblem fr = testing::make_problem(1, "x1^2", {"x1"}, {GPiece::free()});
    const NewtonSystem f = assemble_newton_system(fr, approx_step(fr, vec({0.4}), vec({0})));
    CHECK(f.A(1, 0) == 0);
    CHECK(f.A(1, 1) == doctest::Approx(-1.0));
    CHECK(f.rhs(1) == 0);
  }

  TEST_CASE("inequality toy is solved in at most three iterations") {
    const SolveTrace t = solve_ge(testing::data_problem("ineq_toy.json"), vec({0.5}), vec({0.5}));
    CHECK(t.status == SolveStatus::Solved);
    CHECK(t.newton_steps <= 3);
    CHECK(t.last().x(0) == doctest::Approx(0).epsilon(1e-12));
    CHECK(t.last().y(0) == doctest::Approx(1));
  }

  TEST_CASE("critical equality toy halves the iterates") {
    const SolveTrace t = solve_ge(testing::data_problem("crit_eq.json"), vec({1}), vec({0}));
    // rho_k = sqrt(5) 4^-k, so tol 1e-12 is met after 21 steps.
    CHECK(t.status == SolveStatus::Solved);
    CHECK(t.newton_steps == 21);
    for (size_t k = 0; k + 1 < t.iters.size(); ++k) {
      CHECK(t.iters[k + 1].x(0) / t.iters[k].x(0) == doctest::Approx(0.5).epsilon(1e-9));
      CHECK((1 + t.iters[k + 1].y(0)) / (1 + t.iters[k].y(0)) == doctest::Approx(0.5).epsilon(1e-9));
    }
    for (double r : t.ratios()) CHECK(r == doctest::Approx(0.25).epsilon(1e-6));
    SolverOptions o;
    o.max_iter = 10;
    CHECK(solve_ge(testing::data_problem("crit_eq.json"), vec({1}), vec({0}), o).status == SolveStatus::MaxIter);
  }

  TEST_CASE("start at a solution takes no steps") {
    const SolveTrace t = solve_ge(testing::data_problem("ineq_toy.json"), vec({0}), vec({1}));
    CHECK(t.status == SolveStatus::Solved);
    CHECK(t.newton_steps == 0);
    CHECK(t.iters.size() == 1);
  }

  TEST_CASE("superlinear signature near a strongly regular solution") {
    const CompositeProblem p = testing::data_problem("eq_noncrit.json");
    REQUIRE(verdict_ic_M1(p, vec({0, 0}), vec({0}), Mode::Around).answer == IcAnswer::Yes);
    std::mt19937_64 rng(42);
    for (int k = 0; k < 20; ++k) {
      const Vec s = 0.1 * testing::random_unit(3, rng);
      const SolveTrace t = solve_ge(p, s.head(2), s.tail(1));
      REQUIRE(t.status == SolveStatus::Solved);
      const auto r = t.ratios();
      for (size_t j = 1; j < r.size(); ++j) CHECK(r[j] <= 0.5);
      if (r.size() >= 3)
        for (size_t j = r.size() - 2; j < r.size(); ++j) CHECK(r[j] < r[j - 1]);
    }
  }

  TEST_CASE("regularity diagnostic") {
    const Diagnostic d = regularity_diagnostic(Mat::Identity(3, 3), Mat::Zero(3, 3), 1.0);
    CHECK(d.value == doctest::Approx(std::sqrt(3.0)));
    CHECK(d.within_bound);
    const CompositeProblem it = testing::data_problem("ineq_toy.json");
    const NewtonSystem s = assemble_newton_system(it, approx_step(it, vec({0}), vec({1})));
    // A = [[1,1],[1,0]], B = I: golden ratio times sqrt(5).
    const Diagnostic k = regularity_diagnostic(s.A, s.B, 3.0);
    CHECK(k.value == doctest::Approx((1 + std::sqrt(5.0)) / 2 * std::sqrt(5.0)));
    CHECK(k.within_bound);
    CHECK_FALSE(regularity_diagnostic(s.A, s.B, 1.0).within_bound);
    const CompositeProblem ce = testing::data_problem("crit_eq.json");
    const NewtonSystem z = assemble_newton_system(ce, approx_step(ce, vec({0}), vec({-1})));
    try {
      regularity_diagnostic(z.A, z.B, 1.0);
      FAIL("expected SingularSystem");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::SingularSystem);
    }
  }

  TEST_CASE("solver options validation") {
    SolverOptions o;
    o.beta = 0.5;
    CHECK_THROWS_AS(o.validate(), Error);
    o = SolverOptions{};
    o.tol = 0;
    CHECK_THROWS_AS(o.validate(), Error);
    CHECK(SolverOptions{}.C(2) == doctest::Approx(2.0));
    CHECK(SolverOptions{}.L() == 2.0);
  }

  TEST_CASE("identical inputs give identical traces") {
    const CompositeProblem p = testing::data_problem("example54.json");
    const SolveTrace a = solve_ge(p, vec({0.2, -0.1}), vec({0.5, 0.5}));
    const SolveTrace b = solve_ge(p, vec({0.2, -0.1}), vec({0.5, 0.5}));
    CHECK(a.to_csv() == b.to_csv());
    CHECK(same_trace(a, b, 0.0));
  }

  TEST_CASE("equality problems match the KKT Newton method") {
    std::mt19937_64 rng(43);
    for (int k = 0; k < 20; ++k) {
      const CompositeProblem p = testing::random_equality_problem(rng);
      const Vec s = 0.3 * testing::random_unit(p.n + p.m, rng);
      SolverOptions o;
      o.max_iter = 15;
      CHECK(same_trace(solve_ge(p, s.head(p.n), s.tail(p.m), o), newton_kkt(p, s.head(p.n), s.tail(p.m), o), 1e-12));
    }
  }

  TEST_CASE("trace CSV layout") {
    const SolveTrace t = solve_ge(testing::data_problem("ineq_toy.json"), vec({0.5}), vec({0.5}));
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("iter,x1,y1,r_grad,r_graph,shift,branch,step_norm,diag_value\n", 0) == 0);
    CHECK(static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n')) == t.iters.size() + 1);
  }
}
