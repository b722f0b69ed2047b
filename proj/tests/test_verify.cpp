#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vimflow/verify.hpp"

using namespace vimflow;

namespace {

ManufacturedCase taylor_green() {
  ManufacturedCase c;
  c.name = "tg";
  c.kind = ProblemKind::NavierStokes;
  c.params.nu = 0.1;
  c.grid.n1 = 9;
  c.grid.n2 = 9;
  c.grid.n3 = 1;
  c.grid.nt = 3;
  c.grid.h1 = c.grid.h2 = 2.0 * std::acos(-1.0) / 8.0;
  c.grid.h3 = 1.0;
  c.grid.dt = 0.01;
  c.exact_u = {parse_or_throw("sin(x1)*cos(x2)*exp(-0.2*t)"),
               parse_or_throw("-cos(x1)*sin(x2)*exp(-0.2*t)"), parse_or_throw("0")};
  c.exact_p = parse_or_throw("0.25*(cos(2*x1)+cos(2*x2))*exp(-0.4*t)");
  c.rungs = 2;
  return c;
}

ManufacturedCase micro_case() {
  ManufacturedCase c;
  c.name = "micro";
  c.kind = ProblemKind::Micropolar;
  c.params.nu = 1.0;
  c.params.nu_r = 0.1;
  c.params.c0 = 1.0;
  c.params.ca = 0.5;
  c.params.cd = 1.0;
  c.grid.n1 = 7;
  c.grid.n2 = 7;
  c.grid.n3 = 1;
  c.grid.nt = 2;
  c.grid.h1 = c.grid.h2 = 0.125;
  c.grid.h3 = 1.0;
  c.grid.dt = 0.01;
  c.exact_u = {parse_or_throw("sin(x1)*cos(x2)*exp(-t)"),
               parse_or_throw("-cos(x1)*sin(x2)*exp(-t)"), parse_or_throw("0")};
  c.exact_w = {{parse_or_throw("0"), parse_or_throw("0"),
                parse_or_throw("sin(x1)*sin(x2)*exp(-t)")}};
  c.exact_p = parse_or_throw("0.1*sin(x1+x2)*exp(-t)");
  return c;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const VectorField& v) {
  return std::max({max_abs(v.c1), max_abs(v.c2), max_abs(v.c3)});
}

}  // namespace

TEST_CASE("refinement halves spacings and doubles intervals, skipping degenerate axes") {
  GridSpec g;
  g.n1 = 9;
  g.n2 = 5;
  g.n3 = 1;
  g.nt = 3;
  g.h1 = 0.25;
  g.h2 = 0.5;
  g.h3 = 1.0;
  g.dt = 0.01;
  g.origin = {1.0, 0.0, 0.0, 2.0};
  const GridSpec f = refine(g);
  CHECK(f.n1 == 17);
  CHECK(f.n2 == 9);
  CHECK(f.n3 == 1);
  CHECK(f.nt == 5);
  CHECK(f.h1 == 0.125);
  CHECK(f.h2 == 0.25);
  CHECK(f.h3 == 1.0);
  CHECK(f.dt == 0.005);
  CHECK(f.origin == g.origin);
  // the refined grid covers the same domain
  CHECK(f.h1 * double(f.n1 - 1) == g.h1 * double(g.n1 - 1));
}

TEST_CASE("the grid ladder is nested with the requested number of rungs") {
  ManufacturedCase c = taylor_green();
  c.rungs = 3;
  const auto ladder = grid_ladder(c);
  REQUIRE(ladder.size() == 3);
  CHECK(ladder[0] == c.grid);
  CHECK(ladder[1] == refine(ladder[0]));
  CHECK(ladder[2] == refine(ladder[1]));
}

TEST_CASE("observed orders are the pairwise halving exponents") {
  const auto o = observed_order({1.0, 0.25, 0.0625});
  REQUIRE(o.size() == 2);
  CHECK(o[0] == doctest::Approx(2.0));
  CHECK(o[1] == doctest::Approx(2.0));
  CHECK(observed_order({8.0, 1.0})[0] == doctest::Approx(3.0));
  CHECK_THROWS_AS(observed_order({1.0}), LadderTooShortError);
}

TEST_CASE("the sampled exact state matches the expressions and carries the pressure gauge") {
  const ManufacturedCase c = taylor_green();
  const FlowState s = exact_state(c, c.grid);
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const auto x = c.grid.point(i);
    CHECK(s.u.c1.values[i] == eval_point(c.exact_u[0], x));
    CHECK(s.u.c2.values[i] == eval_point(c.exact_u[1], x));
  }
  const std::size_t nspace = c.grid.n1 * c.grid.n2 * c.grid.n3;
  for (std::size_t it = 0; it < c.grid.nt; ++it) {
    double sum = 0.0;
    for (std::size_t sp = 0; sp < nspace; ++sp) sum += s.p.values[sp * c.grid.nt + it];
    CHECK(std::abs(sum / double(nspace)) <= 1e-14);
  }
}

TEST_CASE("discretely manufactured forcing nulls every residual at the exact fields") {
  const ManufacturedCase c = taylor_green();
  const DiscreteForcing f = manufacture_discrete(c, c.grid);
  const FlowState s = exact_state(c, c.grid);
  REQUIRE(f.pressure_source.has_value());
  CHECK(max_abs(ns_momentum_residual(s, f.body, c.params)) <= 1e-12);
  CHECK(max_abs(ns_pressure_residual_with_source(s, *f.pressure_source)) == 0.0);
}

TEST_CASE("discrete manufacturing covers the micropolar system") {
  const ManufacturedCase c = micro_case();
  const DiscreteForcing f = manufacture_discrete(c, c.grid);
  const FlowState s = exact_state(c, c.grid);
  REQUIRE(f.torque.has_value());
  REQUIRE(f.pressure_source.has_value());
  CHECK(max_abs(mp_momentum_residual(s, f.body, c.params)) <= 1e-12);
  CHECK(max_abs(mp_microrotation_residual(s, *f.torque, c.params)) <= 1e-12);
  CHECK(max_abs(mp_pressure_residual_with_source(s, *f.pressure_source, c.params)) == 0.0);
}

TEST_CASE("the decaying vortex needs no forcing: its symbolic forcing vanishes") {
  const ManufacturedCase c = taylor_green();
  const SymbolicForcing f = manufacture_symbolic(c);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < 3; ++i)
    for (double x1 : {0.3, 1.7, 4.0})
      for (double x2 : {0.1, 2.9})
        for (double t : {0.0, 0.02})
          CHECK(std::abs(eval_point(f.body[i], x1, x2, pi / 3.0, t)) <= 1e-12);
}

TEST_CASE("symbolic forcing balances the continuous equations for a generic solution") {
  // residual of the forced equation, recomputed independently at sample
  // points, must vanish: f was built as exactly that combination
  const ManufacturedCase c = micro_case();
  const SymbolicForcing f = manufacture_symbolic(c);
  REQUIRE(f.torque.has_value());
  // spot check the first momentum component against hand-assembled terms
  auto val = [&](double x1, double x2, double t) {
    const double u1 = std::sin(x1) * std::cos(x2) * std::exp(-t);
    const double u2 = -std::cos(x1) * std::sin(x2) * std::exp(-t);
    const double du1_dt = -u1;
    const double du1_dx1 = std::cos(x1) * std::cos(x2) * std::exp(-t);
    const double du1_dx2 = -std::sin(x1) * std::sin(x2) * std::exp(-t);
    const double lap_u1 = -2.0 * u1;
    const double dp_dx1 = 0.1 * std::cos(x1 + x2) * std::exp(-t);
    const double w3_dx2 = std::sin(x1) * std::cos(x2) * std::exp(-t);
    const double curl_w1 = w3_dx2;  // w = (0,0,w3)
    return du1_dt - (c.params.nu + c.params.nu_r) * lap_u1 + u1 * du1_dx1 + u2 * du1_dx2 +
           dp_dx1 - 2.0 * c.params.nu_r * curl_w1;
  };
  for (double x1 : {0.2, 0.6})
    for (double x2 : {0.3, 0.65})
      for (double t : {0.0, 0.01})
        CHECK(eval_point(f.body[0], x1, x2, 0.0, t) ==
              doctest::Approx(val(x1, x2, t)).epsilon(1e-12));
}

TEST_CASE("the wrapped problem uses the exact expressions as boundary and initial data") {
  const ManufacturedCase c = taylor_green();
  const ProblemSpec prob = problem_from_case(c, c.grid);
  CHECK(prob.kind == c.kind);
  CHECK(prob.grid == c.grid);
  for (double x = 0.0; x < 6.0; x += 1.3) {
    CHECK(eval_point(prob.dirichlet_u[0], x, 0.4, 0.0, 0.1) ==
          eval_point(c.exact_u[0], x, 0.4, 0.0, 0.1));
    CHECK(eval_point(prob.force[0], x, 0.4, 0.0, 0.1) == 0.0);
  }
  const SymbolicForcing sym = manufacture_symbolic(c);
  const ProblemSpec forced = problem_from_case(c, c.grid, &sym);
  CHECK(forced.force[0] == sym.body[0]);
}

TEST_CASE("the error report vanishes at the exact state and names every unknown") {
  const ManufacturedCase c = micro_case();
  const FlowState s = exact_state(c, c.grid);
  const ErrorReport rep = error_report(s, c, c.grid);
  REQUIRE(rep.entries.size() == 7);  // u1 u2 u3 w1 w2 w3 p
  // the pressure is re-projected inside the report; a second projection can
  // shift the last bits, so allow roundoff
  CHECK(rep.max_l2() <= 1e-14);
  CHECK(rep.max_linf() <= 1e-14);
  CHECK(rep.entries.front().name == "u1");
  CHECK(rep.entries.back().name == "p");
}

TEST_CASE("the error report sees a known perturbation") {
  const ManufacturedCase c = taylor_green();
  FlowState s = exact_state(c, c.grid);
  s.u.c1.values[c.grid.index(4, 4, 0, 1)] += 1e-3;
  const ErrorReport rep = error_report(s, c, c.grid);
  CHECK(rep.max_linf() == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(rep.entries[0].linf == rep.max_linf());
  CHECK(rep.entries[1].linf == 0.0);
}

TEST_CASE("case validation rejects incomplete descriptions") {
  ManufacturedCase c = taylor_green();
  c.rungs = 0;
  CHECK_THROWS(c.validate());
  c = taylor_green();
  c.exact_p = nullptr;
  CHECK_THROWS(c.validate());
  c = micro_case();
  c.exact_w.reset();
  CHECK_THROWS(c.validate());
}
