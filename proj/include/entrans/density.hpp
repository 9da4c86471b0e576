#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entrans/grid.hpp"

namespace entrans {

enum class Provenance { Transport, EulerLagrange, PdeEvolved, GaugeTransformed, Sampled, Uniform };

std::string_view toString(Provenance p);

// Normalized field (trapezoid integral 1) together with the partition
// constant of the unnormalized field it came from.
struct Density {
  ScalarField field;
  double logZ = 0.0;
  double Z = 1.0;
  std::vector<double> lambda;
  Point basepoint;
  Provenance provenance = Provenance::Uniform;

  const GridSpec& grid() const noexcept { return field.grid(); }
  double operator[](std::size_t node) const noexcept { return field[node]; }
};

// Normalizes exp(-(potential - min potential)) with the trapezoid rule, so
// exponentials never overflow. logZ is that of exp(-potential). Throws
// SolverError when the partition sum is not positive and finite.
Density densityFromLogWeights(const GridSpec& g, std::vector<double> potential, Provenance provenance);

// Uniform density 1/volume.
Density uniformDensity(const GridSpec& g);

// Throws InputError unless |integral - 1| <= tolerance.
void requireNormalized(const ScalarField& p, double tolerance = 1e-8);

// Warning text when the largest boundary value exceeds 1e-8 * max value,
// meaning the box truncates visible mass.
std::optional<std::string> boundaryMassWarning(const ScalarField& p);

}  // namespace entrans
