#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "entrans/density.hpp"
#include "entrans/expr.hpp"
#include "entrans/grid.hpp"
#include "entrans/polyline.hpp"

namespace entrans {

// Source of a connection one-form A = A_i dx^i. Either exact, A = scale * dJ
// with J kept for reference, or given componentwise (possibly not closed).
class Connection {
 public:
  static Connection exact(const Expr& potential, double scale = 1.0);
  static Connection fromComponents(std::vector<Expr> components, double scale = 1.0);

  int dimension() const noexcept { return static_cast<int>(components_.size()); }
  bool isExact() const noexcept { return potential_.has_value(); }
  const std::optional<Expr>& potential() const noexcept { return potential_; }
  double scale() const noexcept { return scale_; }
  // Unscaled component expressions.
  const std::vector<Expr>& components() const noexcept { return components_; }

  // A(x) . direction
  double pairing(std::span<const double> x, std::span<const double> direction) const;

 private:
  Connection() = default;
  std::vector<Expr> components_;
  std::optional<Expr> potential_;
  double scale_ = 1.0;
};

enum class Quadrature { Trapezoid, Gauss4 };

struct QuadratureOptions {
  Quadrature rule = Quadrature::Gauss4;
  // Segments longer than this are split into equal panels.
  double maxPanelLength = std::numeric_limits<double>::infinity();
};

// +integral of A along the path (composite rule, one panel per segment unless
// maxPanelLength splits it). Domain errors name the segment.
double lineIntegral(const Connection& a, const Polyline& path, const QuadratureOptions& opts = {});
inline double lineIntegral(const Connection& a, const Polyline& path, Quadrature rule) {
  return lineIntegral(a, path, QuadratureOptions{rule});
}

struct TransportResult {
  double integral = 0.0;
  double factor = 1.0;  // exp(-integral), always > 0
  std::vector<double> partialSums;  // running integral after each segment
};

TransportResult parallelTransport(const Connection& a, const Polyline& path, const QuadratureOptions& opts = {});

// Solves s' = -A(phi(t)) . phi'(t) s, s(0) = 1 with classical RK4 on each
// segment and returns s at the end of the path.
double transportByOde(const Connection& a, const Polyline& path, int stepsPerSegment = 32);

// Max relative spread (max f - min f) / min f of transport factors, computed
// in the log domain.
double transportSpread(const Connection& a, std::span<const Polyline> paths, const QuadratureOptions& opts = {});

// Straight path plus k-1 random polylines (2..16 vertices, interior vertices
// uniform in the grid box) from start to end, seeded.
std::vector<Polyline> randomPaths(const GridSpec& box, const Point& start, const Point& end, int k,
                                  std::uint64_t seed);

double pathIndependenceCheck(const Connection& a, const GridSpec& box, const Point& start, const Point& end, int k,
                             std::uint64_t seed, const QuadratureOptions& opts = {});

// Density whose unnormalized value at node x is the transport factor along
// the straight path basepoint -> x, normalized by the trapezoid partition sum.
// The basepoint defaults to the box center. Panels are at most `panelNodes`
// grid spacings long.
Density buildDensityByTransport(const Connection& a, const GridSpec& g, std::optional<Point> basepoint = std::nullopt,
                                double panelNodes = 8.0);
Density buildDensityByTransport(const Expr& potential, double lambda, const GridSpec& g,
                                std::optional<Point> basepoint = std::nullopt);

}  // namespace entrans
