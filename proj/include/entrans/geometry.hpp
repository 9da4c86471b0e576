#pragma once

#include <utility>
#include <vector>

#include "entrans/expr.hpp"
#include "entrans/grid.hpp"
#include "entrans/polyline.hpp"

namespace entrans {

// Node-wise evaluation. Domain errors are rethrown with node coordinates.
ScalarField sampleScalar(const Expr& e, const GridSpec& g);

// A_i = scale * dJ/dx_i, differentiated symbolically and then sampled.
CovectorField connectionForm(const Expr& potential, const GridSpec& g, double scale = 1.0);

// A_i = scale * components[i], for connections that need not be exact.
CovectorField sampleCovector(const std::vector<Expr>& components, const GridSpec& g, double scale = 1.0);

struct CurvatureReport {
  double maxCurvature = 0.0;  // max |d_i A_j - d_j A_i| over interior nodes, i < j
  double tolerance = 0.0;
  bool flat = true;
};

// Central differences on interior nodes only. In one dimension every form is
// closed and the report is flat with maximum 0.
CurvatureReport curvature(const CovectorField& a, double tolerance);

// Same stencil with the edge midpoints replaced by 4-point Gauss means along
// the edges of the 2h square around each interior node: the circulation of
// A = scale * components per unit area. Telescopes to rounding for exact
// forms; the midpoint version above carries an O(h^2) defect for general J.
CurvatureReport curvature(const std::vector<Expr>& components, const GridSpec& g, double scale, double tolerance);

class SeedNotFoundError : public SolverError {
 public:
  using SolverError::SolverError;
};

class CriticalPointError : public SolverError {
 public:
  CriticalPointError(const Point& where, double gradientNorm);
  const Point& where() const noexcept { return where_; }

 private:
  Point where_;
};

inline constexpr double kCriticalGradient = 1e-10;

// Traces the level set J = c inside the grid box (2-D only) by arc-length
// stepping along the rotated gradient with Newton projection. One polyline per
// connected component found from the grid seeds; closed when the head comes
// back within `step` of its start, clipped at the box otherwise.
std::vector<Polyline> traceLevelSet(const Expr& potential, const GridSpec& g, double level, double step,
                                    int maxSteps);

// Frobenius norm of the symbolic Hessian at x; sets the containment tolerance
// 10 * step^2 * bound for traced vertices.
double hessianBound(const Expr& potential, std::span<const double> x);

struct FieldSplit {
  CovectorField horizontal;
  CovectorField vertical;
};

// Orthogonal split of a vector field against the covector field `a` under the
// Euclidean metric: vertical = (v.a_hat) a_hat, horizontal = v - vertical.
// Nodes with |a| < 1e-12 split as (v, 0).
FieldSplit splitField(const CovectorField& v, const CovectorField& a);

}  // namespace entrans
