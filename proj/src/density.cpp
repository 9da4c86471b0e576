#include "entrans/density.hpp"

#include <algorithm>
#include <cmath>

#include "format.hpp"

namespace entrans {

std::string_view toString(Provenance p) {
  switch (p) {
    case Provenance::Transport: return "transport";
    case Provenance::EulerLagrange: return "euler-lagrange";
    case Provenance::PdeEvolved: return "pde-evolved";
    case Provenance::GaugeTransformed: return "gauge-transformed";
    case Provenance::Sampled: return "sampled";
    case Provenance::Uniform: return "uniform";
  }
  return "unknown";
}

Density densityFromLogWeights(const GridSpec& g, std::vector<double> potential, Provenance provenance) {
  if (potential.size() != g.nodeCount()) throw InputError("potential size does not match grid");
  const double shift = *std::min_element(potential.begin(), potential.end());
  const auto w = g.trapezoidWeights();
  double sum = 0.0;
  for (std::size_t n = 0; n < potential.size(); ++n) {
    potential[n] = std::exp(-(potential[n] - shift));
    sum += w[n] * potential[n];
  }
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw SolverError("normalization failed: partition sum " + fmt17(sum) + " is not positive and finite");
  for (double& v : potential) v /= sum;
  Density d;
  d.field = ScalarField(g, std::move(potential));
  d.logZ = std::log(sum) - shift;
  d.Z = std::exp(d.logZ);
  d.provenance = provenance;
  return d;
}

Density uniformDensity(const GridSpec& g) {
  Density d = densityFromLogWeights(g, std::vector<double>(g.nodeCount(), 0.0), Provenance::Uniform);
  return d;
}

void requireNormalized(const ScalarField& p, double tolerance) {
  const double mass = integrate(p);
  if (!(std::abs(mass - 1.0) <= tolerance))
    throw InputError("density is not normalized: integral is " + fmt17(mass));
}

std::optional<std::string> boundaryMassWarning(const ScalarField& p) {
  const GridSpec& g = p.grid();
  double top = 0.0;
  double edge = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    top = std::max(top, std::abs(p[n]));
    if (g.onBoundary(n)) edge = std::max(edge, std::abs(p[n]));
  }
  if (edge > 1e-8 * top)
    return "boundary density " + fmt17(edge) + " exceeds 1e-8 of the maximum " + fmt17(top) +
           "; the box truncates the density";
  return std::nullopt;
}

}  // namespace entrans
