#include <doctest.h>

#include <cmath>
#include <vector>

#include "entrans/dynamics.hpp"
#include "entrans/parallel.hpp"
#include "entrans/random.hpp"
#include "entrans/transport.hpp"
#include "oracles.hpp"

using namespace entrans;

namespace {

const Expr kBowl = parse("x1^2 + x2^2", 2);

FPConfig gradientConfig(const Expr& j, double lambda, double dt, double endTime, int every = 100) {
  FPConfig cfg;
  cfg.drift = Drift::gradient(j, lambda);
  cfg.dt = dt;
  cfg.endTime = endTime;
  cfg.sampleEvery = every;
  return cfg;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("Philox known answers") {
  using C = Philox4x32::Counter;
  CHECK((Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  CHECK((Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
         C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  CHECK((Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
         C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST_CASE("batched uniforms equal the scalar generator") {
  const Philox4x32::Key key{0x1234567u, 0x89abcdefu};
  const std::uint64_t first = 0xfffffff0ull;
  std::vector<double> a(600), b(600);
  philoxUniformPairs(first, a.size(), 17, 3, key, a.data(), b.data());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::uint64_t idx = first + i;
    const auto r = Philox4x32::generate(
        {static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32), 17, 3}, key);
    REQUIRE(a[i] == uniformOpen(join(r[0], r[1])));
    REQUIRE(b[i] == uniformOpen(join(r[2], r[3])));
    REQUIRE(a[i] > 0.0);
    REQUIRE(a[i] < 1.0);
  }
}

TEST_CASE("normal quantile against the erfc oracle") {
  std::vector<double> ps = {1e-300, 1e-100, 1e-20, 1e-10, 1e-5, 0.001, 0.02, 0.02425, 0.1, 0.3,
                            0.5 + 1e-9, 0.7, 0.9, 0.97575, 0.99, 1 - 1e-5, 1 - 1e-10};
  for (int k = 1; k < 200; ++k) ps.push_back(k / 200.0);
  for (double p : ps) {
    const double ref = oracle::normalQuantile(p);
    INFO("p = " << p);
    CHECK(std::abs(normalQuantile(p) - ref) <= 1.2e-9 * std::abs(ref) + 1e-15);
    if (p >= kNormalCentralLow && p <= 1 - kNormalCentralLow)
      CHECK(std::abs(normalQuantileCentral(p) - ref) <= 1.2e-9 * std::abs(ref) + 1e-15);
  }
  CHECK(normalQuantile(0.5) == 0.0);
}

TEST_CASE("stability bound") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 101);
  const double diffusive = 0.1 * 0.1 / 4.0;
  CHECK(stabilityBound(Drift::gradient(Expr::constant(0.0, 2), 1.0), 1.0, g) == doctest::Approx(diffusive).epsilon(1e-14));
  const double withDrift = stabilityBound(Drift::gradient(kBowl, 1.0), 1.0, g);
  CHECK(withDrift <= diffusive);
  CHECK(withDrift > 0.5 * diffusive);

  FPConfig cfg = gradientConfig(kBowl, 1.0, 1.01 * withDrift, 0.1);
  CHECK_THROWS_AS(evolveFP(uniformDensity(g), cfg), InputError);
}

TEST_CASE("pure diffusion relaxes monotonically to uniform") {
  const GridSpec g = GridSpec::cube(2, -2, 2, 41);
  const Density start = buildDensityByTransport(parse("(x1 - 1)^2 + 3 * x2^2", 2), 1.0, g);
  FPConfig cfg = gradientConfig(Expr::constant(0.0, 2), 1.0, 0.002, 8.0, 200);
  const FPTrajectory traj = evolveFP(start, cfg);
  const Density flat = uniformDensity(g);
  double prev = l1Distance(traj.snapshots.front().density.field, flat.field);
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const double d = l1Distance(traj.snapshots[k].density.field, flat.field);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("evolution from uniform reaches the transport density") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 101);
  const Density target = buildDensityByTransport(kBowl, 1.0, g);
  const double dt = 0.9 * stabilityBound(Drift::gradient(kBowl, 1.0), 1.0, g);
  const double endTime = std::ceil(5.0 / dt) * dt;
  const FPTrajectory traj = evolveFP(uniformDensity(g), gradientConfig(kBowl, 1.0, dt, endTime, 200));
  CHECK(l1Distance(traj.snapshots.back().density.field, target.field) <= 1e-3);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const FPSnapshot& s = traj.snapshots[k];
    CHECK(std::abs(s.mass - 1.0) <= 1e-10 * std::max(s.time, 1.0));
    CHECK(s.minValue >= -1e-14);
    REQUIRE(s.freeEnergy.has_value());
    if (k > 0) {
      const FPSnapshot& p = traj.snapshots[k - 1];
      const double stepsBetween = std::round((s.time - p.time) / dt);
      CHECK(*s.freeEnergy <= *p.freeEnergy + 1e-10 * stepsBetween);
    }
  }
  CHECK(traj.warnings.empty());
}

TEST_CASE("the discrete equilibrium is stationary") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 81);
  const Density target = buildDensityByTransport(kBowl, 1.0, g);
  const double dt = 0.9 * stabilityBound(Drift::gradient(kBowl, 1.0), 1.0, g);
  const FPTrajectory traj = evolveFP(target, gradientConfig(kBowl, 1.0, dt, 1.0, 1000000));
  CHECK(l1Distance(traj.snapshots.back().density.field, target.field) <= 1e-6);
}

TEST_CASE("stationary residual") {
  const GridSpec line = GridSpec::cube(1, -8, 8, 401);
  const Density gauss = buildDensityByTransport(parse("x1^2", 1), 1.0, line);
  for (std::size_t i = 0; i < line.nodeCount(); ++i) {
    const double x = line.point(i)[0];
    REQUIRE(std::abs(gauss[i] - std::exp(-x * x) / std::sqrt(M_PI)) <= 1e-9);
  }
  CHECK(stationaryResidual(gauss, gradientConfig(parse("x1^2", 1), 1.0, 1e-4, 1.0)) <= 1e-4);

  const GridSpec g = GridSpec::cube(2, -5, 5, 51);
  const Density flat = uniformDensity(g);
  CHECK(stationaryResidual(flat, gradientConfig(Expr::constant(0.0, 2), 1.0, 1e-4, 1.0)) <= 1e-12);
  // div(p grad x1^2) = 2p for constant p.
  CHECK(stationaryResidual(flat, gradientConfig(parse("x1^2", 2), 1.0, 1e-4, 1.0)) ==
        doctest::Approx(2.0 / g.volume()).epsilon(1e-10));
}

TEST_CASE("free energy of the equilibrium is -D ln Z") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 101);
  const Density p = buildDensityByTransport(kBowl, 1.0, g);
  CHECK(freeEnergy(p.field, kBowl, 1.0, 1.0) == doctest::Approx(-std::log(M_PI)).epsilon(1e-8));
}

TEST_CASE("stationarity certificates") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 101);
  const StationarityCertificate grad = certifyStationarity({parse("-2*x1", 2), parse("-2*x2", 2)}, 1.0, g);
  CHECK(grad.solvable);
  CHECK(grad.curvatureMax <= 1e-8);
  CHECK(grad.pathSpread <= 1e-8);
  REQUIRE(grad.fpResidual.has_value());
  CHECK(*grad.fpResidual <= 1e-4);
  REQUIRE(grad.density.has_value());
  const Density exact = buildDensityByTransport(kBowl, 1.0, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.nodeCount(); ++i) worst = std::max(worst, std::abs((*grad.density)[i] / exact[i] - 1));
  CHECK(worst <= 1e-9);

  const StationarityCertificate skew =
      certifyStationarity({parse("-2*x1 + x2", 2), parse("-2*x2 - x1", 2)}, 1.0, g);
  CHECK_FALSE(skew.solvable);
  CHECK(std::abs(skew.curvatureMax - 2.0) <= 1e-6);
  CHECK_FALSE(skew.fpResidual.has_value());

  const StationarityCertificate still =
      certifyStationarity({Expr::constant(0.0, 2), Expr::constant(0.0, 2)}, 1.0, g);
  CHECK(still.solvable);
  REQUIRE(still.density.has_value());
  const Density flat = uniformDensity(g);
  for (std::size_t i = 0; i < g.nodeCount(); ++i) REQUIRE(std::abs((*still.density)[i] - flat[i]) <= 1e-15);
}

TEST_CASE("histogram binning") {
  const GridSpec g = GridSpec::cube(1, 0, 2, 3);
  const Density h = histogramDensity(g, {0.1, 0.9, 1.2, 1.9});
  CHECK(h[0] == doctest::Approx(1 / (4 * 0.5)));
  CHECK(h[1] == doctest::Approx(2 / (4 * 1.0)));
  CHECK(h[2] == doctest::Approx(1 / (4 * 0.5)));
  CHECK(integrate(h.field) == doctest::Approx(1.0));
}

TEST_CASE("Langevin determinism") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 41);
  LangevinOptions o;
  o.particles = 3000;
  o.dt = 1e-3;
  o.endTime = 0.2;
  o.seed = 42;
  setThreadCount(1);
  const LangevinResult a = langevinSample(kBowl, 1.0, 1.0, g, o);
  const LangevinResult b = langevinSample(kBowl, 1.0, 1.0, g, o);
  setThreadCount(3);
  const LangevinResult c = langevinSample(kBowl, 1.0, 1.0, g, o);
  setThreadCount(1);
  REQUIRE(a.positions.size() == 2 * o.particles);
  CHECK(a.positions == b.positions);
  CHECK(a.positions == c.positions);
  CHECK(a.steps == 200);
  for (double x : a.positions) REQUIRE(std::abs(x) <= 5.0);

  o.seed = 43;
  CHECK(langevinSample(kBowl, 1.0, 1.0, g, o).positions != a.positions);
}

TEST_CASE("Langevin input checks") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 41);
  LangevinOptions o;
  o.particles = 100;
  o.dt = 1e-2;
  o.endTime = 0.1;
  CHECK_THROWS_AS(langevinSample(kBowl, 1.0, 1.0, g, o), InputError);

  // A steep linear potential has no curvature, so only the escape guard stops it.
  const GridSpec small = GridSpec::cube(2, -1, 1, 11);
  o.dt = 1e-3;
  CHECK_THROWS_AS(langevinSample(parse("-3000 * x1", 2), 1.0, 1.0, small, o), SolverError);
}

TEST_CASE("reflected Brownian motion equilibrates to uniform") {
  const GridSpec g = GridSpec::cube(2, -5, 5, 21);
  LangevinOptions o;
  o.particles = 1000000;
  o.dt = 1e-3;
  o.endTime = 0.5;
  o.seed = 5;
  const LangevinResult r = langevinSample(kBowl, 0.0, 1.0, g, o);
  CHECK(l1Distance(r.histogram.field, uniformDensity(g).field) <= 0.02);
}

}  // TEST_SUITE
