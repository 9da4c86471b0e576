#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entrans/density.hpp"
#include "entrans/expr.hpp"
#include "entrans/grid.hpp"

namespace entrans {

// Velocity field b of dp/dt = -div(b p) + D lap p. A gradient drift
// b = -lambda grad J keeps J so the discretization can use exact potential
// differences.
class Drift {
 public:
  static Drift gradient(const Expr& potential, double lambda);
  static Drift fromComponents(std::vector<Expr> components);

  int dimension() const noexcept { return static_cast<int>(components_.size()); }
  bool isGradient() const noexcept { return potential_.has_value(); }
  const std::optional<Expr>& potential() const noexcept { return potential_; }
  double lambda() const noexcept { return lambda_; }
  // b_i as expressions (already scaled).
  const std::vector<Expr>& components() const noexcept { return components_; }

 private:
  Drift() = default;
  std::vector<Expr> components_;
  std::optional<Expr> potential_;
  double lambda_ = 1.0;
};

struct FPConfig {
  Drift drift = Drift::fromComponents({Expr()});
  double diffusion = 1.0;
  double dt = 1e-3;
  double endTime = 1.0;
  int sampleEvery = 100;  // steps between snapshots
};

// Largest admissible explicit step: the smaller of min_i h_i^2 / (2 n D) and
// the step that keeps every diagonal coefficient of the update non-negative.
double stabilityBound(const Drift& drift, double diffusion, const GridSpec& g);

struct FPSnapshot {
  double time = 0.0;
  Density density;
  double mass = 1.0;
  double minValue = 0.0;
  std::optional<double> freeEnergy;  // gradient drifts only
};

struct FPTrajectory {
  std::vector<FPSnapshot> snapshots;  // t = 0, every sampleEvery steps, and the end
  long steps = 0;
  double dtMax = 0.0;
  std::vector<std::string> warnings;
};

// Explicit conservative finite-volume scheme on the trapezoid dual cells with
// Scharfetter-Gummel (exponentially fitted upwind) edge fluxes and no-flux
// boundaries. Throws InputError when dt exceeds stabilityBound and
// SolverError if a value drops below -1e-14.
FPTrajectory evolveFP(const Density& initial, const FPConfig& cfg);

// Max over interior nodes of |dp/dt| under the discrete operator.
double stationaryResidual(const Density& p, const FPConfig& cfg);

// int p (lambda J + D ln p), the Lyapunov functional of the evolution.
double freeEnergy(const ScalarField& p, const Expr& potential, double lambda, double diffusion = 1.0);

struct CertifyTolerances {
  double curvature = 1e-8;
  double pathSpread = 1e-8;
  double fpResidual = 1e-4;
};

struct StationarityCertificate {
  double curvatureMax = 0.0;
  double pathSpread = 0.0;
  std::optional<double> fpResidual;  // only computed when the first two checks pass
  bool solvable = false;
  CertifyTolerances tolerances;
  std::optional<Density> density;
};

// Treats -drift / lambda as the candidate connection: curvature on the grid,
// transport spread over 8 seeded paths for each of 4 endpoint pairs, then the
// stationary residual of the transport-built density.
StationarityCertificate certifyStationarity(const std::vector<Expr>& drift, double lambda, const GridSpec& g,
                                            const CertifyTolerances& tol = {}, std::uint64_t seed = 1,
                                            double diffusion = 1.0);

struct LangevinOptions {
  std::size_t particles = 100000;
  double dt = 1e-3;
  double endTime = 1.0;
  std::uint64_t seed = 1;
};

struct LangevinResult {
  std::vector<double> positions;  // particle-major, dimension values each
  Density histogram;              // nearest-node counts / (n * trapezoid weight)
  long steps = 0;
};

// Euler-Maruyama for dX = -lambda grad J dt + sqrt(2 D) dW with reflection at
// the box. Particles start uniform in the box. Particle i draws from the
// Philox stream keyed by the seed with its index in the counter, so results do
// not depend on the thread count. Throws SolverError when a particle lands
// outside the box doubled about its center.
LangevinResult langevinSample(const Expr& potential, double lambda, double diffusion, const GridSpec& g,
                              const LangevinOptions& opts);

// Nearest-node histogram of particle positions, normalized like a density.
Density histogramDensity(const GridSpec& g, const std::vector<double>& positions);

}  // namespace entrans
