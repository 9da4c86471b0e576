#include "entrans/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "entrans/geometry.hpp"
#include "entrans/parallel.hpp"
#include "entrans/random.hpp"
#include "entrans/transport.hpp"
#include "format.hpp"

namespace entrans {

Drift Drift::gradient(const Expr& potential, double lambda) {
  Drift d;
  for (int i = 0; i < potential.dimension(); ++i) d.components_.push_back((-lambda) * potential.derivative(i));
  d.potential_ = potential;
  d.lambda_ = lambda;
  return d;
}

Drift Drift::fromComponents(std::vector<Expr> components) {
  if (components.empty()) throw InputError("a drift needs at least one component");
  for (const Expr& e : components)
    if (e.dimension() != static_cast<int>(components.size()))
      throw InputError("drift component '" + e.toString() + "' has the wrong dimension");
  Drift d;
  d.components_ = std::move(components);
  return d;
}

namespace {

// z / (exp(z) - 1)
double bernoulli(double z) {
  if (z == 0.0) return 1.0;
  return z / std::expm1(z);
}

constexpr std::array<double, 4> kGaussNode{0.5 - 0.43056815579702629, 0.5 - 0.16999052179242813,
                                           0.5 + 0.16999052179242813, 0.5 + 0.43056815579702629};
constexpr std::array<double, 4> kGaussWeight{0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
                                             0.17392742256872693};

// Discrete generator L with (L p)_n = dp_n/dt. Flux across the face between n
// and n + e_d is fwd[d][n] p_n - bwd[d][n] p_{n+e_d}; its weights already
// include face area, D / h_d and the exponential fitting.
class FPOperator {
 public:
  FPOperator(const Drift& drift, double diffusion, const GridSpec& g) : g_(g) {
    if (drift.dimension() != g.dimension()) throw InputError("drift dimension does not match grid");
    if (!(diffusion > 0.0)) throw InputError("diffusion coefficient must be positive");
    const int dim = g.dimension();
    const std::size_t nodes = g.nodeCount();
    const auto weights = g.trapezoidWeights();
    invVol_.resize(nodes);
    mask_.assign(nodes, 0);
    for (std::size_t n = 0; n < nodes; ++n) invVol_[n] = 1.0 / weights[n];

    std::vector<double> jv;
    if (drift.isGradient()) {
      const ScalarField j = sampleScalar(*drift.potential(), g);
      jv.assign(j.values().begin(), j.values().end());
    }

    Point x(dim), y(dim);
    for (int d = 0; d < dim; ++d) {
      fwd_[d].assign(nodes, 0.0);
      bwd_[d].assign(nodes, 0.0);
      const double h = g.spacing(d);
      const std::size_t s = g.stride(d);
      for (std::size_t n = 0; n < nodes; ++n) {
        const auto idx = g.multiIndex(n);
        if (idx[d] > 0) mask_[n] |= static_cast<unsigned char>(2u << (2 * d));
        if (idx[d] + 1 >= g.axis(d).nodes) continue;
        mask_[n] |= static_cast<unsigned char>(1u << (2 * d));

        double area = 1.0;
        for (int k = 0; k < dim; ++k) {
          if (k == d) continue;
          const bool edge = idx[k] == 0 || idx[k] == g.axis(k).nodes - 1;
          area *= edge ? 0.5 * g.spacing(k) : g.spacing(k);
        }
        // z = (Phi(n+e_d) - Phi(n)) with Phi the potential of -b / D.
        double z = 0.0;
        if (drift.isGradient()) {
          z = drift.lambda() * (jv[n + s] - jv[n]) / diffusion;
        } else {
          g.coordinates(n, x);
          double integral = 0.0;
          for (int q = 0; q < 4; ++q) {
            y = x;
            y[d] += kGaussNode[q] * h;
            integral += kGaussWeight[q] * drift.components()[d].evaluate(y);
          }
          z = -integral * h / diffusion;
        }
        const double c = area * diffusion / h;
        fwd_[d][n] = c * bernoulli(z);
        bwd_[d][n] = c * bernoulli(-z);
      }
    }
  }

  void apply(const double* p, double* out) const {
    const int dim = g_.dimension();
    std::array<std::size_t, GridSpec::kMaxDimension> stride{};
    for (int d = 0; d < dim; ++d) stride[d] = g_.stride(d);
    parallelFor(g_.nodeCount(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t n = begin; n < end; ++n) {
        double acc = 0.0;
        const unsigned m = mask_[n];
        for (int d = 0; d < dim; ++d) {
          const std::size_t s = stride[d];
          if (m & (1u << (2 * d))) acc -= fwd_[d][n] * p[n] - bwd_[d][n] * p[n + s];
          if (m & (2u << (2 * d))) acc += fwd_[d][n - s] * p[n - s] - bwd_[d][n - s] * p[n];
        }
        out[n] = acc * invVol_[n];
      }
    });
  }

  // 1 / max_n |L_nn|
  double positivityBound() const {
    const int dim = g_.dimension();
    double worst = 0.0;
    for (std::size_t n = 0; n < g_.nodeCount(); ++n) {
      double out = 0.0;
      for (int d = 0; d < dim; ++d) {
        if (mask_[n] & (1u << (2 * d))) out += fwd_[d][n];
        if (mask_[n] & (2u << (2 * d))) out += bwd_[d][n - g_.stride(d)];
      }
      worst = std::max(worst, out * invVol_[n]);
    }
    return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
  }

 private:
  const GridSpec& g_;
  std::array<std::vector<double>, GridSpec::kMaxDimension> fwd_;
  std::array<std::vector<double>, GridSpec::kMaxDimension> bwd_;
  std::vector<double> invVol_;
  std::vector<unsigned char> mask_;
};

double diffusiveBound(double diffusion, const GridSpec& g) {
  double h2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.dimension(); ++i) h2 = std::min(h2, g.spacing(i) * g.spacing(i));
  return h2 / (2.0 * g.dimension() * diffusion);
}

Density snapshotDensity(const GridSpec& g, std::vector<double> values) {
  Density d;
  d.field = ScalarField(g, std::move(values));
  d.provenance = Provenance::PdeEvolved;
  return d;
}

}  // namespace

double stabilityBound(const Drift& drift, double diffusion, const GridSpec& g) {
  const FPOperator op(drift, diffusion, g);
  return std::min(diffusiveBound(diffusion, g), op.positivityBound());
}

double freeEnergy(const ScalarField& p, const Expr& potential, double lambda, double diffusion) {
  const ScalarField j = sampleScalar(potential, p.grid());
  const auto w = p.grid().trapezoidWeights();
  double f = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    f += w[n] * p[n] * lambda * j[n];
    if (p[n] > 0.0) f += w[n] * diffusion * p[n] * std::log(p[n]);
  }
  return f;
}

FPTrajectory evolveFP(const Density& initial, const FPConfig& cfg) {
  const GridSpec& g = initial.grid();
  requireNormalized(initial.field);
  const FPOperator op(cfg.drift, cfg.diffusion, g);

  FPTrajectory traj;
  traj.dtMax = std::min(diffusiveBound(cfg.diffusion, g), op.positivityBound());
  if (!(cfg.dt > 0.0) || cfg.dt > traj.dtMax * (1.0 + 1e-12))
    throw InputError("time step " + fmt17(cfg.dt) + " violates the stability bound " + fmt17(traj.dtMax));
  if (!(cfg.endTime >= cfg.dt)) throw InputError("end time must be at least one time step");
  if (cfg.sampleEvery < 1) throw InputError("sampleEvery must be positive");

  const long steps = std::lround(cfg.endTime / cfg.dt);
  const auto w = g.trapezoidWeights();
  std::vector<double> p(initial.field.values().begin(), initial.field.values().end());
  std::vector<double> rate(p.size());

  auto record = [&](long step) {
    FPSnapshot s;
    s.time = step * cfg.dt;
    double mass = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < p.size(); ++n) {
      mass += w[n] * p[n];
      lo = std::min(lo, p[n]);
    }
    s.mass = mass;
    s.minValue = lo;
    s.density = snapshotDensity(g, p);
    if (cfg.drift.isGradient())
      s.freeEnergy = freeEnergy(s.density.field, *cfg.drift.potential(), cfg.drift.lambda(), cfg.diffusion);
    traj.snapshots.push_back(std::move(s));
  };

  record(0);
  for (long k = 1; k <= steps; ++k) {
    op.apply(p.data(), rate.data());
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < p.size(); ++n) {
      p[n] += cfg.dt * rate[n];
      lo = std::min(lo, p[n]);
    }
    if (lo < -1e-14)
      throw SolverError("density dropped to " + fmt17(lo) + " at t = " + fmt17(k * cfg.dt) + "; flux bug");
    if (k % cfg.sampleEvery == 0 || k == steps) record(k);
  }
  traj.steps = steps;
  if (cfg.drift.isGradient())
    if (auto warn = boundaryMassWarning(traj.snapshots.back().density.field)) traj.warnings.push_back(*warn);
  return traj;
}

double stationaryResidual(const Density& p, const FPConfig& cfg) {
  requireNormalized(p.field);
  const GridSpec& g = p.grid();
  const FPOperator op(cfg.drift, cfg.diffusion, g);
  std::vector<double> rate(p.field.size());
  op.apply(p.field.values().data(), rate.data());
  double worst = 0.0;
  for (std::size_t n = 0; n < rate.size(); ++n)
    if (!g.onBoundary(n)) worst = std::max(worst, std::abs(rate[n]));
  return worst;
}

// ---------------------------------------------------------------- certificate

StationarityCertificate certifyStationarity(const std::vector<Expr>& drift, double lambda, const GridSpec& g,
                                            const CertifyTolerances& tol, std::uint64_t seed, double diffusion) {
  if (lambda == 0.0 || !std::isfinite(lambda)) throw InputError("certifyStationarity needs a finite nonzero lambda");
  if (static_cast<int>(drift.size()) != g.dimension()) throw InputError("drift dimension does not match grid");

  StationarityCertificate cert;
  cert.tolerances = tol;
  cert.curvatureMax = curvature(drift, g, -1.0 / lambda, tol.curvature).maxCurvature;

  const Connection candidate = Connection::fromComponents(drift, -1.0 / lambda);
  double hmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.dimension(); ++i) hmin = std::min(hmin, g.spacing(i));
  const QuadratureOptions opts{Quadrature::Gauss4, 8.0 * hmin};

  static constexpr std::array<std::array<double, 4>, 4> kEnds{{
      {0.2, 0.2, 0.8, 0.8},
      {0.8, 0.2, 0.2, 0.8},
      {0.5, 0.5, 0.9, 0.3},
      {0.35, 0.35, 0.1, 0.65},
  }};
  for (std::size_t pair = 0; pair < kEnds.size(); ++pair) {
    Point a(g.dimension()), b(g.dimension());
    for (int i = 0; i < g.dimension(); ++i) {
      const Axis& ax = g.axis(i);
      const double fa = i == 0 ? kEnds[pair][0] : kEnds[pair][1];
      const double fb = i == 0 ? kEnds[pair][2] : kEnds[pair][3];
      a[i] = ax.lower + fa * (ax.upper - ax.lower);
      b[i] = ax.lower + fb * (ax.upper - ax.lower);
    }
    cert.pathSpread =
        std::max(cert.pathSpread, pathIndependenceCheck(candidate, g, a, b, 8, seed + pair, opts));
  }

  if (cert.curvatureMax <= tol.curvature && cert.pathSpread <= tol.pathSpread) {
    // Stationary density of the D-diffusion: transport along -drift / D.
    Density density = buildDensityByTransport(Connection::fromComponents(drift, -1.0 / diffusion), g);
    FPConfig cfg;
    cfg.drift = Drift::fromComponents(drift);
    cfg.diffusion = diffusion;
    cert.fpResidual = stationaryResidual(density, cfg);
    cert.density = std::move(density);
  }
  cert.solvable = cert.curvatureMax <= tol.curvature && cert.pathSpread <= tol.pathSpread && cert.fpResidual &&
                  *cert.fpResidual <= tol.fpResidual;
  return cert;
}

// ---------------------------------------------------------------- Langevin

Density histogramDensity(const GridSpec& g, const std::vector<double>& positions) {
  const int dim = g.dimension();
  const std::size_t count = positions.size() / dim;
  if (count == 0) throw InputError("histogram needs at least one particle");
  std::vector<std::uint64_t> bins(g.nodeCount(), 0);
  std::array<int, GridSpec::kMaxDimension> idx{};
  for (std::size_t p = 0; p < count; ++p) {
    for (int d = 0; d < dim; ++d) {
      const Axis& ax = g.axis(d);
      const double u = (positions[p * dim + d] - ax.lower) / ax.spacing();
      idx[d] = std::clamp(static_cast<int>(std::lround(u)), 0, ax.nodes - 1);
    }
    ++bins[g.linearIndex(idx)];
  }
  const auto w = g.trapezoidWeights();
  std::vector<double> values(g.nodeCount());
  for (std::size_t n = 0; n < values.size(); ++n)
    values[n] = static_cast<double>(bins[n]) / (static_cast<double>(count) * w[n]);
  Density d;
  d.field = ScalarField(g, std::move(values));
  d.provenance = Provenance::Sampled;
  return d;
}

namespace {

constexpr std::size_t kBlock = 512;

// Central-branch quantiles in place; tail lanes are left as uniforms and
// flagged by the sentinel -10 - u, below any central-branch value. Returns the number of tail lanes.
int centralNormals(double* __restrict u, std::size_t count) {
  int tails = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = u[i];
    const bool tail = (v < kNormalCentralLow) | (v > 1.0 - kNormalCentralLow);
    tails += tail;
    const double c = normalQuantileCentral(v);
    const double flag = -10.0 - v;
    u[i] = tail ? flag : c;
  }
  return tails;
}

void tailNormals(double* u, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    if (u[i] <= -10.0) u[i] = normalQuantile(-10.0 - u[i]);
}

// Euler-Maruyama step with reflection; returns the number of lanes that
// left [escLo, escHi] before reflecting.
int advance(double* __restrict x, const double* __restrict force, const double* __restrict z, std::size_t count,
            double dt, double noise, double lo, double hi, double escLo, double escHi) {
  int escaped = 0;
  for (std::size_t i = 0; i < count; ++i) {
    double y = x[i] + dt * force[i] + noise * z[i];
    escaped += !(y >= escLo) | !(y <= escHi);
    const double below = 2.0 * lo - y;
    y = y < lo ? below : y;
    const double above = 2.0 * hi - y;
    y = y > hi ? above : y;
    x[i] = y;
  }
  return escaped;
}

}  // namespace

LangevinResult langevinSample(const Expr& potential, double lambda, double diffusion, const GridSpec& g,
                              const LangevinOptions& opts) {
  const int dim = g.dimension();
  if (potential.dimension() != dim) throw InputError("potential dimension does not match grid");
  if (!(diffusion > 0.0)) throw InputError("diffusion coefficient must be positive");
  if (!(opts.dt > 0.0) || !(opts.endTime >= opts.dt)) throw InputError("Langevin needs 0 < dt <= T");
  if (opts.particles == 0) throw InputError("Langevin needs at least one particle");

  std::vector<Expr> drift;
  for (int i = 0; i < dim; ++i) drift.push_back((-lambda) * potential.derivative(i));

  // dt must resolve the fastest relaxation time 1 / |lambda Hessian|.
  double stiffness = 0.0;
  {
    std::vector<double> frob(g.nodeCount(), 0.0);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        const ScalarField s = sampleScalar(drift[i].derivative(j), g);
        for (std::size_t n = 0; n < frob.size(); ++n) frob[n] += s[n] * s[n];
      }
    for (double f : frob) stiffness = std::max(stiffness, std::sqrt(f));
  }
  if (stiffness > 0.0 && opts.dt > 1e-2 / stiffness)
    throw InputError("dt " + fmt17(opts.dt) + " exceeds 1e-2 of the confinement time scale " +
                     fmt17(1.0 / stiffness));

  const long steps = std::lround(opts.endTime / opts.dt);
  if (steps >= static_cast<long>(std::numeric_limits<std::uint32_t>::max())) throw InputError("too many Langevin steps");
  const double noise = std::sqrt(2.0 * diffusion * opts.dt);
  const Philox4x32::Key key{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32)};

  std::array<double, GridSpec::kMaxDimension> lo{}, hi{}, escLo{}, escHi{};
  for (int d = 0; d < dim; ++d) {
    lo[d] = g.axis(d).lower;
    hi[d] = g.axis(d).upper;
    const double c = 0.5 * (lo[d] + hi[d]);
    const double width = hi[d] - lo[d];
    escLo[d] = c - width;
    escHi[d] = c + width;
  }

  LangevinResult result;
  result.steps = steps;
  result.positions.resize(opts.particles * dim);
  const std::size_t blocks = (opts.particles + kBlock - 1) / kBlock;
  const int lanes = dim <= 2 ? 1 : 2;

  parallelFor(blocks, [&](std::size_t b0, std::size_t b1) {
    std::array<std::vector<double>, GridSpec::kMaxDimension> x, force;
    std::array<std::vector<double>, 4> z;
    for (int d = 0; d < dim; ++d) {
      x[d].resize(kBlock);
      force[d].resize(kBlock);
    }
    for (auto& v : z) v.resize(kBlock);
    std::vector<double> scratch;
    std::array<const double*, GridSpec::kMaxDimension> coords{};

    for (std::size_t blk = b0; blk < b1; ++blk) {
      const std::size_t first = blk * kBlock;
      const std::size_t count = std::min(kBlock, opts.particles - first);

      for (int lane = 0; lane < lanes; ++lane)
        philoxUniformPairs(first, count, 0, static_cast<std::uint32_t>(lane), key, z[2 * lane].data(),
                           z[2 * lane + 1].data());
      for (int d = 0; d < dim; ++d)
        for (std::size_t i = 0; i < count; ++i) x[d][i] = lo[d] + z[d][i] * (hi[d] - lo[d]);
      for (int d = 0; d < dim; ++d) coords[d] = x[d].data();
      const std::span<const double* const> view(coords.data(), dim);

      for (long step = 1; step <= steps; ++step) {
        for (int d = 0; d < dim; ++d) drift[d].evaluateBatch(view, count, force[d].data(), scratch);

        for (int lane = 0; lane < lanes; ++lane)
          philoxUniformPairs(first, count, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(lane), key,
                             z[2 * lane].data(), z[2 * lane + 1].data());

        for (int d = 0; d < dim; ++d) {
          if (centralNormals(z[d].data(), count) > 0) tailNormals(z[d].data(), count);
          const int escaped =
              advance(x[d].data(), force[d].data(), z[d].data(), count, opts.dt, noise, lo[d], hi[d], escLo[d], escHi[d]);
          if (escaped)
            throw SolverError("a Langevin particle left the box doubled about its center at step " +
                              std::to_string(step) + "; reduce dt");
        }
      }

      for (std::size_t i = 0; i < count; ++i)
        for (int d = 0; d < dim; ++d) result.positions[(first + i) * dim + d] = x[d][i];
    }
  });
  result.histogram = histogramDensity(g, result.positions);
  return result;
}

}  // namespace entrans
