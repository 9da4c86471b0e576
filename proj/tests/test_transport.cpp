#include <doctest.h>

#include <cmath>
#include <random>

#include "entrans/geometry.hpp"
#include "entrans/parallel.hpp"
#include "entrans/transport.hpp"
#include "oracles.hpp"

using namespace entrans;

namespace {

const Expr kBowl = parse("x1^2 + x2^2", 2);

Polyline circle(int n, double r, double from, double to) {
  Polyline p;
  for (int k = 0; k <= n; ++k) {
    const double t = from + (to - from) * k / n;
    p.vertices.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return p;
}

Connection rotation() { return Connection::fromComponents({parse("-x2", 2), parse("x1", 2)}); }

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("line integrals of exact and rotational forms") {
  const Connection a = Connection::exact(kBowl);
  const Polyline diag{{{0, 0}, {1, 1}}, false};
  CHECK(std::abs(lineIntegral(a, diag, Quadrature::Gauss4) - 2.0) <= 1e-12);
  CHECK(std::abs(lineIntegral(a, diag, Quadrature::Trapezoid) - 2.0) <= 1e-12);

  const Polyline square{{{-1, -1}, {2, -1}, {2, 0.5}, {-1, 0.5}}, true};
  CHECK(std::abs(lineIntegral(a, square)) <= 1e-10);

  Polyline ring = circle(100000, 1.0, 0.0, 2 * M_PI);
  ring.vertices.pop_back();
  ring.closed = true;
  CHECK(std::abs(lineIntegral(rotation(), ring) - 2 * M_PI) <= 1e-8);
}

TEST_CASE("transport factors") {
  const Connection a = Connection::exact(kBowl);
  const TransportResult r = parallelTransport(a, Polyline{{{0, 0}, {1, 1}}, false});
  CHECK(std::abs(r.factor - std::exp(-2.0)) <= 1e-9);
  CHECK(r.factor == std::exp(-r.integral));
  REQUIRE(r.partialSums.size() == 1);

  const Polyline loop{{{0.3, 0.1}, {1.2, -0.4}, {0.7, 0.9}}, true};
  CHECK(std::abs(parallelTransport(a, loop).factor - 1.0) <= 1e-9);

  const Polyline there{{{0, 0}, {1, 1}}, false};
  const Polyline back = concatenate(there, reversed(there));
  CHECK(std::abs(parallelTransport(a, back).factor - 1.0) <= 1e-12);
}

TEST_CASE("factor is positive even for huge integrals") {
  const Connection steep = Connection::exact(parse("800*x1", 1));
  const TransportResult r = parallelTransport(steep, Polyline{{{0}, {1}}, false});
  CHECK(r.integral == doctest::Approx(800.0));
  CHECK(r.factor >= 0.0);
  CHECK(parallelTransport(steep, Polyline{{{1}, {0}}, false}).factor > 0.0);
}

TEST_CASE("gauss4 agrees with the RK4 ODE") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> step(-0.15, 0.15);
  const Expr j = parse("exp(0.3*x1)*cos(x2) + 0.2*x1*x2^2", 2);
  const Connection c = Connection::exact(j, 0.8);
  for (int trial = 0; trial < 10; ++trial) {
    Polyline p{{{0.1, -0.2}}, false};
    const int segments = 1 + trial * 7;
    for (int k = 0; k < segments; ++k) {
      const Point& last = p.vertices.back();
      p.vertices.push_back({last[0] + step(rng), last[1] + step(rng)});
    }
    const double quad = parallelTransport(c, p).factor;
    const double ode = transportByOde(c, p);
    const double exact = std::exp(-0.8 * (j.evaluate(p.vertices.back()) - j.evaluate(p.vertices.front())));
    CHECK(std::abs(quad - ode) <= 1e-9 * quad);
    CHECK(std::abs(quad - exact) <= 1e-12 * exact);
  }
}

TEST_CASE("gradient theorem on polynomial potentials") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const char* src : {"x1^2 + x2^2", "x1^4 - 3*x1^2*x2 + x2^3", "0.25*(x1^2 - 1)^2 + x1*x2"}) {
    const Expr j = parse(src, 2);
    for (double lambda : {1.0, 0.3, -2.5}) {
      const Connection c = Connection::exact(j, lambda);
      for (int k = 0; k < 20; ++k) {
        const Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
        const double expected = lambda * (j.evaluate(b) - j.evaluate(a));
        CHECK(std::abs(lineIntegral(c, Polyline{{a, b}, false}) - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
      }
    }
  }
}

TEST_CASE("concatenation homomorphism") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  const Connection c = Connection::exact(parse("sin(x1)*x2 + x1^2", 2), 1.3);
  for (int k = 0; k < 50; ++k) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, m{u(rng), u(rng)}, e{u(rng), u(rng)};
    const Polyline p1{{a, m, b}, false}, p2{{b, e}, false};
    const double joined = parallelTransport(c, concatenate(p1, p2)).factor;
    const double product = parallelTransport(c, p1).factor * parallelTransport(c, p2).factor;
    CHECK(std::abs(joined - product) <= 1e-12 * product);
  }
  CHECK_THROWS_AS(concatenate(Polyline{{{0, 0}, {1, 0}}, false}, Polyline{{{2, 0}, {3, 0}}, false}), InputError);
}

TEST_CASE("path independence") {
  const GridSpec box = GridSpec::cube(2, -5, 5, 11);
  CHECK(pathIndependenceCheck(Connection::exact(kBowl), box, {-1, 0.5}, {2, 3}, 8, 42) <= 1e-8);
  CHECK(pathIndependenceCheck(Connection::exact(parse("0", 2)), box, {-1, 0.5}, {2, 3}, 8, 42) == 0.0);

  const std::vector<Polyline> halves{circle(20000, 1, 0, M_PI), circle(20000, 1, 0, -M_PI)};
  const double spread = transportSpread(rotation(), halves);
  const double expected = (std::exp(M_PI) - std::exp(-M_PI)) / std::exp(-M_PI);
  CHECK(spread == doctest::Approx(expected).epsilon(1e-6));

  const auto paths = randomPaths(box, {0, 0}, {1, 1}, 8, 5);
  REQUIRE(paths.size() == 8);
  CHECK(paths[0].vertices.size() == 2);
  for (const Polyline& p : paths) {
    CHECK(p.vertices.size() >= 2);
    CHECK(p.vertices.size() <= 16);
    for (const Point& v : p.vertices) CHECK(box.contains(v));
  }
  const auto again = randomPaths(box, {0, 0}, {1, 1}, 8, 5);
  for (std::size_t i = 0; i < paths.size(); ++i) CHECK(paths[i].vertices == again[i].vertices);
  CHECK_THROWS_AS(randomPaths(box, {0, 0}, {9, 1}, 8, 5), InputError);
}

TEST_CASE("domain errors name the segment") {
  const Connection c = Connection::fromComponents({parse("ln(x1)", 2), parse("0", 2)});
  try {
    lineIntegral(c, Polyline{{{1, 0}, {2, 0}, {-1, 0}}, false});
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("segment 1") != std::string::npos);
  }
}

TEST_CASE("density built by transport reproduces the Gaussian") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 201);
  const Density d = buildDensityByTransport(kBowl, 1.0, g);
  CHECK((d.provenance == Provenance::Transport));
  CHECK(std::abs(d.Z - M_PI) <= 1e-6);
  const std::size_t origin = g.nodeCount() / 2;
  CHECK(g.point(origin) == Point{0, 0});
  CHECK(std::abs(d[origin] - 1 / M_PI) <= 1e-6);

  const double oneD = oracle::trapezoid([](double x) { return std::exp(-x * x); }, -5, 5, 201);
  const double z = oneD * oneD;
  CHECK(d.Z == doctest::Approx(z).epsilon(1e-12));
  double worst = 0.0;
  for (std::size_t n = 0; n < g.nodeCount(); ++n) {
    const Point x = g.point(n);
    const double direct = std::exp(-x[0] * x[0] - x[1] * x[1]) / z;
    worst = std::max(worst, std::abs(d[n] - direct) / direct);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("basepoint only rescales the unnormalized field") {
  const GridSpec g = GridSpec::cube(2, -4, 4, 41);
  const Density a = buildDensityByTransport(kBowl, 1.0, g);
  const Density b = buildDensityByTransport(kBowl, 1.0, g, Point{1.0, -2.0});
  CHECK(b.basepoint == Point{1.0, -2.0});
  for (std::size_t n = 0; n < g.nodeCount(); ++n) CHECK(b[n] == doctest::Approx(a[n]).epsilon(1e-11));
  // Z of exp(-(J - J(x0))) is e^{J(x0)} times that of exp(-J)
  CHECK(b.Z == doctest::Approx(a.Z * std::exp(5.0)).epsilon(1e-11));
  CHECK_THROWS_AS(buildDensityByTransport(kBowl, 1.0, g, Point{9.0, 0.0}), InputError);
}

TEST_CASE("zero potential gives the uniform density") {
  const GridSpec g = GridSpec::cube(2, 0, 2, 11);
  const Density d = buildDensityByTransport(parse("0", 2), 1.0, g);
  for (double v : d.field.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("classic ODE consistency of the transport density") {
  auto defect = [](int nodes) {
    const GridSpec g = GridSpec::cube(2, -3, 3, nodes);
    const Expr j = parse("x1^2 + 0.5*x2^2 + 0.2*x1*x2", 2);
    const double lambda = 1.3;
    const Density d = buildDensityByTransport(j, lambda, g);
    const CovectorField a = connectionForm(j, g, lambda);
    double worst = 0.0;
    for (std::size_t n = 0; n < g.nodeCount(); ++n) {
      if (g.onBoundary(n)) continue;
      for (int i = 0; i < 2; ++i) {
        const std::size_t s = g.stride(i);
        const double dp = (d[n + s] - d[n - s]) / (2 * g.spacing(i));
        worst = std::max(worst, std::abs(dp + a(n, i) * d[n]));
      }
    }
    return worst;
  };
  const double coarse = defect(61), fine = defect(121);
  CHECK(coarse < 1e-2);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("thread count does not change the transport density") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 101);
  setThreadCount(1);
  const Density one = buildDensityByTransport(kBowl, 1.0, g);
  setThreadCount(3);
  const Density three = buildDensityByTransport(kBowl, 1.0, g);
  setThreadCount(1);
  CHECK(one.Z == three.Z);
  for (std::size_t n = 0; n < g.nodeCount(); ++n) CHECK(one[n] == three[n]);
}

}
