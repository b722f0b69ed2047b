#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "vimflow/operators.hpp"

using namespace vimflow;

namespace {

GridSpec make_grid(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t nt,
                   double h = 0.25, double dt = 0.1) {
  GridSpec g;
  g.n1 = n1;
  g.n2 = n2;
  g.n3 = n3;
  g.nt = nt;
  g.h1 = g.h2 = g.h3 = h;
  g.dt = dt;
  return g;
}

using PointFn = std::function<double(double, double, double, double)>;

ScalarField fill(const GridSpec& g, const PointFn& fn) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.point(i);
    f.values[i] = fn(x[0], x[1], x[2], x[3]);
  }
  return f;
}

ScalarField random_field(const GridSpec& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (auto& v : f.values) v = dist(rng);
  return f;
}

VectorField random_vector(const GridSpec& g, unsigned seed) {
  VectorField v(g);
  for (int i = 0; i < 3; ++i) v.component(i) = random_field(g, seed + unsigned(i));
  return v;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

bool bit_equal(const ScalarField& a, const ScalarField& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.values[i] != b.values[i]) return false;
  return true;
}

bool interior_node(const GridSpec& g, std::size_t idx) {
  const auto c = g.coords(idx);
  const std::size_t ext[4] = {g.n1, g.n2, g.n3, g.nt};
  for (int a = 0; a < 3; ++a)
    if (ext[a] > 1 && (c[std::size_t(a)] == 0 || c[std::size_t(a)] == ext[a] - 1))
      return false;
  return true;
}

}  // namespace

TEST_CASE("first derivative is exact on quadratics, boundaries included") {
  const GridSpec g = make_grid(7, 6, 5, 3);
  const ScalarField f = fill(g, [](double x1, double x2, double x3, double t) {
    return 1.5 + 2.0 * x1 - 0.5 * x1 * x1 + x2 * x3 + 0.25 * t;
  });
  const ScalarField d1 = ddx(f, Axis::X1);
  const ScalarField ex1 = fill(g, [](double x1, double, double, double) {
    return 2.0 - x1;
  });
  CHECK(max_abs_diff(d1, ex1) <= 1e-12);

  const ScalarField d2f = ddx(f, Axis::X2);
  const ScalarField ex2 = fill(g, [](double, double, double x3, double) { return x3; });
  CHECK(max_abs_diff(d2f, ex2) <= 1e-12);
}

TEST_CASE("time derivative is exact on quadratics in t") {
  const GridSpec g = make_grid(4, 4, 1, 6);
  const ScalarField f = fill(g, [](double x1, double, double, double t) {
    return x1 + 3.0 * t - 2.0 * t * t;
  });
  const ScalarField dt = ddt(f);
  const ScalarField ex = fill(g, [](double, double, double, double t) {
    return 3.0 - 4.0 * t;
  });
  CHECK(max_abs_diff(dt, ex) <= 1e-12);
}

TEST_CASE("second derivative is exact on quadratics") {
  for (std::size_t n : {3u, 4u, 9u}) {
    const GridSpec g = make_grid(n, 5, 1, 2);
    const ScalarField f = fill(g, [](double x1, double x2, double, double) {
      return 4.0 * x1 * x1 - x1 + 2.0 * x2 + 7.0;
    });
    CHECK(max_abs_diff(d2(f, Axis::X1), ScalarField(g, 8.0)) <= 1e-12);
    CHECK(max_abs_diff(d2(f, Axis::X2), ScalarField(g, 0.0)) <= 1e-12);
  }
}

TEST_CASE("derivatives along degenerate axes are exactly zero") {
  const GridSpec g = make_grid(6, 1, 1, 4);
  const ScalarField f = random_field(g, 11);
  CHECK(bit_equal(ddx(f, Axis::X2), ScalarField(g)));
  CHECK(bit_equal(d2(f, Axis::X3), ScalarField(g)));
}

TEST_CASE("mixed derivative is exact on bilinear monomials and rejects equal axes") {
  const GridSpec g = make_grid(6, 7, 4, 2);
  const ScalarField f = fill(g, [](double x1, double x2, double, double) {
    return 3.0 * x1 * x2;
  });
  CHECK(max_abs_diff(d_mixed(f, Axis::X1, Axis::X2), ScalarField(g, 3.0)) <= 1e-12);
  CHECK_THROWS_AS(d_mixed(f, Axis::X1, Axis::X1), SameAxisError);
}

TEST_CASE("mixed derivatives commute to roundoff") {
  const GridSpec g = make_grid(8, 7, 6, 2);
  const ScalarField f = random_field(g, 23);
  const ScalarField ab = d_mixed(f, Axis::X1, Axis::X3);
  const ScalarField ba = d_mixed(f, Axis::X3, Axis::X1);
  CHECK(max_abs_diff(ab, ba) <= 1e-12);
}

TEST_CASE("laplacian equals the sum of the three spatial second derivatives bit for bit") {
  const GridSpec g = make_grid(7, 6, 5, 3);
  const ScalarField f = random_field(g, 37);
  const ScalarField lap = laplacian(f);
  const ScalarField a = d2(f, Axis::X1);
  const ScalarField b = d2(f, Axis::X2);
  const ScalarField c = d2(f, Axis::X3);
  ScalarField manual(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    manual.values[i] = a.values[i] + b.values[i] + c.values[i];
  CHECK(bit_equal(lap, manual));
}

TEST_CASE("divergence of a curl vanishes at interior nodes") {
  const GridSpec g = make_grid(9, 8, 7, 2);
  const VectorField v = random_vector(g, 41);
  const ScalarField dc = divergence(curl(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (interior_node(g, i)) worst = std::max(worst, std::abs(dc.values[i]));
  CHECK(worst <= 1e-13);
}

TEST_CASE("curl of a gradient vanishes at interior nodes") {
  const GridSpec g = make_grid(9, 8, 7, 2);
  const ScalarField p = random_field(g, 43);
  const VectorField cg = curl(gradient(p));
  double worst = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.size(); ++i)
      if (interior_node(g, i))
        worst = std::max(worst, std::abs(cg.component(c).values[i]));
  CHECK(worst <= 1e-13);
}

TEST_CASE("operators are linear, bit-exact for power-of-two scaling") {
  const GridSpec g = make_grid(7, 6, 5, 3);
  const ScalarField f = random_field(g, 53);
  ScalarField f2(g);
  for (std::size_t i = 0; i < g.size(); ++i) f2.values[i] = 2.0 * f.values[i];
  const ScalarField da = ddx(f2, Axis::X1);
  const ScalarField db = ddx(f, Axis::X1);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(da.values[i] == 2.0 * db.values[i]);

  const ScalarField h = random_field(g, 59);
  ScalarField sum(g);
  for (std::size_t i = 0; i < g.size(); ++i) sum.values[i] = f.values[i] + h.values[i];
  const ScalarField ls = d2(sum, Axis::X2);
  const ScalarField lf = d2(f, Axis::X2);
  const ScalarField lh = d2(h, Axis::X2);
  ScalarField manual(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    manual.values[i] = lf.values[i] + lh.values[i];
  CHECK(max_abs_diff(ls, manual) <= 1e-12);
}

TEST_CASE("prefix integral of one reproduces the coordinate and rejects the time axis") {
  const GridSpec g = make_grid(9, 4, 1, 2);
  const ScalarField one(g, 1.0);
  const ScalarField I = prefix_integral(one, Axis::X1);
  const ScalarField ex = fill(g, [](double x1, double, double, double) { return x1; });
  CHECK(max_abs_diff(I, ex) <= 1e-14);
  CHECK_THROWS_AS(prefix_integral(one, Axis::T), TemporalAxisError);
}

TEST_CASE("prefix integral is exact on linear integrands") {
  const GridSpec g = make_grid(11, 3, 1, 2);
  const ScalarField f = fill(g, [](double x1, double, double, double) {
    return 2.0 + 3.0 * x1;
  });
  const ScalarField I = prefix_integral(f, Axis::X1);
  const ScalarField ex = fill(g, [](double x1, double, double, double) {
    return 2.0 * x1 + 1.5 * x1 * x1;
  });
  CHECK(max_abs_diff(I, ex) <= 1e-13);
}

TEST_CASE("prefix integral is monotone for nonnegative integrands") {
  const GridSpec g = make_grid(9, 5, 1, 3);
  ScalarField f = random_field(g, 61);
  for (auto& v : f.values) v = std::abs(v);
  const ScalarField I = prefix_integral(f, Axis::X2);
  const std::size_t s = g.stride(Axis::X2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.coords(i);
    if (c[1] + 1 < g.n2) CHECK(I.values[i + s] >= I.values[i]);
  }
}

TEST_CASE("differentiating the prefix integral recovers the integrand inside") {
  const GridSpec g = make_grid(33, 3, 1, 2, 1.0 / 32.0);
  const ScalarField f = fill(g, [](double x1, double x2, double, double) {
    return std::sin(3.0 * x1 + x2);
  });
  const ScalarField I = prefix_integral(f, Axis::X1);
  const ScalarField back = ddx(I, Axis::X1);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.coords(i);
    if (c[0] == 0 || c[0] == g.n1 - 1) continue;
    worst = std::max(worst, std::abs(back.values[i] - f.values[i]));
  }
  CHECK(worst <= 5e-3);  // both ends of the composition are second order
}

TEST_CASE("first derivative converges at second order") {
  auto probe = [](std::size_t n) {
    const GridSpec g = make_grid(n, 3, 1, 2, 1.0 / double(n - 1));
    const ScalarField f = fill(g, [](double x1, double, double, double) {
      return std::exp(x1) * std::sin(4.0 * x1);
    });
    const ScalarField d = ddx(f, Axis::X1);
    const ScalarField ex = fill(g, [](double x1, double, double, double) {
      return std::exp(x1) * (std::sin(4.0 * x1) + 4.0 * std::cos(4.0 * x1));
    });
    return max_abs_diff(d, ex);
  };
  const double e1 = probe(17), e2 = probe(33);
  CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("second derivative converges at second order") {
  auto probe = [](std::size_t n) {
    const GridSpec g = make_grid(n, 3, 1, 2, 1.0 / double(n - 1));
    const ScalarField f = fill(g, [](double x1, double, double, double) {
      return std::sin(5.0 * x1);
    });
    const ScalarField d = d2(f, Axis::X1);
    const ScalarField ex = fill(g, [](double x1, double, double, double) {
      return -25.0 * std::sin(5.0 * x1);
    });
    return max_abs_diff(d, ex);
  };
  const double e1 = probe(17), e2 = probe(33);
  CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("L2 norm of a constant equals the constant times the root of the volume") {
  const GridSpec g = make_grid(9, 5, 1, 4, 0.125, 0.05);
  const ScalarField f(g, 2.0);
  const double vol = (0.125 * 8.0) * (0.125 * 4.0) * (0.05 * 3.0);
  CHECK(norm_l2(f) == doctest::Approx(2.0 * std::sqrt(vol)).epsilon(1e-13));
}

TEST_CASE("Linf norm picks the largest magnitude") {
  const GridSpec g = make_grid(5, 5, 1, 2);
  ScalarField f = random_field(g, 67);
  f.values[7] = -3.5;
  CHECK(norm_linf(f) == 3.5);
  CHECK(norm(f, NormKind::Linf) == 3.5);
  CHECK(norm(f, NormKind::L2) == norm_l2(f));
}

TEST_CASE("diff_norm of identical fields is zero") {
  const GridSpec g = make_grid(6, 6, 2, 3);
  const ScalarField f = random_field(g, 71);
  CHECK(diff_norm(f, f, NormKind::L2) == 0.0);
  const VectorField v = random_vector(g, 73);
  CHECK(diff_norm(v, v, NormKind::Linf) == 0.0);
}

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  const GridSpec g = make_grid(13, 11, 7, 4, 0.1, 0.02);
  const ScalarField f = random_field(g, 79);
  CHECK(bit_equal(ddx(f, Axis::X1), ref::ddx(f, Axis::X1)));
  CHECK(bit_equal(ddx(f, Axis::X3), ref::ddx(f, Axis::X3)));
  CHECK(bit_equal(d2(f, Axis::X2), ref::d2(f, Axis::X2)));
  CHECK(bit_equal(laplacian(f), ref::laplacian(f)));
  CHECK(bit_equal(prefix_integral(f, Axis::X2), ref::prefix_integral(f, Axis::X2)));
  CHECK(norm_l2(f) == ref::norm_l2(f));
  CHECK(norm_linf(f) == ref::norm_linf(f));
}

TEST_CASE("ensure_finite names the first bad node in traversal order") {
  const GridSpec g = make_grid(4, 4, 1, 2);
  ScalarField f = random_field(g, 83);
  f.values[9] = std::nan("");
  f.values[20] = std::numeric_limits<double>::infinity();
  try {
    ensure_finite(f, "test");
    CHECK(false);
  } catch (const NonFiniteError& e) {
    CHECK(e.node == 9);
  }
}
