#include "entrans/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "format.hpp"

namespace entrans {

GridSpec::GridSpec(std::vector<Axis> axes, std::size_t nodeCap) : axes_(std::move(axes)) {
  if (axes_.empty() || dimension() > kMaxDimension)
    throw InputError("grid dimension must be between 1 and 3, got " + std::to_string(axes_.size()));
  count_ = 1;
  for (int i = dimension() - 1; i >= 0; --i) {
    const Axis& a = axes_[i];
    if (!std::isfinite(a.lower) || !std::isfinite(a.upper) || !(a.upper > a.lower))
      throw InputError("grid axis " + std::to_string(i + 1) + ": upper bound must exceed lower bound");
    if (a.nodes < 3) throw InputError("grid axis " + std::to_string(i + 1) + ": at least 3 nodes required");
    strides_[i] = count_;
    count_ *= static_cast<std::size_t>(a.nodes);
    if (count_ > nodeCap)
      throw InputError("grid has more than " + std::to_string(nodeCap) + " nodes");
  }
}

GridSpec GridSpec::cube(int dimension, double lower, double upper, int nodes) {
  return GridSpec(std::vector<Axis>(static_cast<std::size_t>(std::max(dimension, 0)), Axis{lower, upper, nodes}));
}

std::array<int, GridSpec::kMaxDimension> GridSpec::multiIndex(std::size_t node) const noexcept {
  std::array<int, kMaxDimension> idx{};
  for (int i = 0; i < dimension(); ++i) {
    idx[i] = static_cast<int>(node / strides_[i]);
    node %= strides_[i];
  }
  return idx;
}

std::size_t GridSpec::linearIndex(std::span<const int> index) const noexcept {
  std::size_t node = 0;
  for (int i = 0; i < dimension(); ++i) node += static_cast<std::size_t>(index[i]) * strides_[i];
  return node;
}

void GridSpec::coordinates(std::size_t node, std::span<double> out) const noexcept {
  const auto idx = multiIndex(node);
  for (int i = 0; i < dimension(); ++i) out[i] = axes_[i].coordinate(idx[i]);
}

Point GridSpec::point(std::size_t node) const {
  Point p(dimension());
  coordinates(node, p);
  return p;
}

std::vector<std::vector<double>> GridSpec::coordinateArrays() const {
  std::vector<std::vector<double>> out(dimension(), std::vector<double>(count_));
  for (std::size_t n = 0; n < count_; ++n) {
    const auto idx = multiIndex(n);
    for (int i = 0; i < dimension(); ++i) out[i][n] = axes_[i].coordinate(idx[i]);
  }
  return out;
}

bool GridSpec::contains(std::span<const double> x, double slack) const noexcept {
  if (static_cast<int>(x.size()) != dimension()) return false;
  for (int i = 0; i < dimension(); ++i)
    if (!(x[i] >= axes_[i].lower - slack && x[i] <= axes_[i].upper + slack)) return false;
  return true;
}

bool GridSpec::onBoundary(std::size_t node) const noexcept {
  const auto idx = multiIndex(node);
  for (int i = 0; i < dimension(); ++i)
    if (idx[i] == 0 || idx[i] == axes_[i].nodes - 1) return true;
  return false;
}

Point GridSpec::center() const {
  Point c(dimension());
  for (int i = 0; i < dimension(); ++i) c[i] = 0.5 * (axes_[i].lower + axes_[i].upper);
  return c;
}

double GridSpec::volume() const noexcept {
  double v = 1.0;
  for (const Axis& a : axes_) v *= a.upper - a.lower;
  return v;
}

std::vector<double> GridSpec::trapezoidWeights() const {
  std::vector<double> w(count_, 1.0);
  for (std::size_t n = 0; n < count_; ++n) {
    const auto idx = multiIndex(n);
    for (int i = 0; i < dimension(); ++i) {
      const Axis& a = axes_[i];
      w[n] *= (idx[i] == 0 || idx[i] == a.nodes - 1) ? 0.5 * a.spacing() : a.spacing();
    }
  }
  return w;
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  if (a.dimension() != b.dimension()) return false;
  for (int i = 0; i < a.dimension(); ++i) {
    const Axis& x = a.axes_[i];
    const Axis& y = b.axes_[i];
    if (x.lower != y.lower || x.upper != y.upper || x.nodes != y.nodes) return false;
  }
  return true;
}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.nodeCount())
    throw InputError("scalar field has " + std::to_string(values_.size()) + " values for " +
                     std::to_string(grid_.nodeCount()) + " nodes");
  for (std::size_t n = 0; n < values_.size(); ++n)
    if (!std::isfinite(values_[n])) throw InputError("scalar field value at node " + std::to_string(n) + " is not finite");
}

CovectorField::CovectorField(GridSpec grid, std::vector<double> components)
    : grid_(std::move(grid)), components_(std::move(components)) {
  if (components_.size() != grid_.nodeCount() * static_cast<std::size_t>(grid_.dimension()))
    throw InputError("covector field component count does not match grid");
  for (double c : components_)
    if (!std::isfinite(c)) throw InputError("covector field component is not finite");
}

double integrate(const ScalarField& f) {
  const auto w = f.grid().trapezoidWeights();
  double s = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) s += w[n] * f[n];
  return s;
}

double l1Distance(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw InputError("l1Distance: fields live on different grids");
  const auto w = a.grid().trapezoidWeights();
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += w[n] * std::abs(a[n] - b[n]);
  return s;
}

namespace {

void writeHeader(std::ostream& os, int dim, const char* tail) {
  for (int i = 0; i < dim; ++i) os << 'x' << (i + 1) << ',';
  os << tail << '\n';
}

}  // namespace

void writeCsv(std::ostream& os, const ScalarField& f) {
  const GridSpec& g = f.grid();
  writeHeader(os, g.dimension(), "value");
  Point x(g.dimension());
  for (std::size_t n = 0; n < f.size(); ++n) {
    g.coordinates(n, x);
    for (double c : x) os << fmt17(c) << ',';
    os << fmt17(f[n]) << '\n';
  }
}

void writeCsv(std::ostream& os, const CovectorField& f) {
  const GridSpec& g = f.grid();
  const int d = g.dimension();
  for (int i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
  for (int i = 0; i < d; ++i) os << 'A' << (i + 1) << (i + 1 < d ? ',' : '\n');
  Point x(d);
  for (std::size_t n = 0; n < g.nodeCount(); ++n) {
    g.coordinates(n, x);
    for (double c : x) os << fmt17(c) << ',';
    for (int i = 0; i < d; ++i) os << fmt17(f(n, i)) << (i + 1 < d ? ',' : '\n');
  }
}

}  // namespace entrans
