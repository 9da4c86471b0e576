#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "entrans/error.hpp"

namespace entrans {

using Point = std::vector<double>;

struct Axis {
  double lower = 0.0;
  double upper = 1.0;
  int nodes = 3;

  double spacing() const noexcept { return (upper - lower) / (nodes - 1); }
  // Exact at both ends.
  double coordinate(int i) const noexcept { return i == nodes - 1 ? upper : lower + i * spacing(); }
};

// Tensor-product grid over a box in 1..3 dimensions, row-major with the last
// axis varying fastest.
class GridSpec {
 public:
  static constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 24;
  static constexpr int kMaxDimension = 3;

  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes, std::size_t nodeCap = kDefaultNodeCap);

  // Same box and node count on every axis.
  static GridSpec cube(int dimension, double lower, double upper, int nodes);

  int dimension() const noexcept { return static_cast<int>(axes_.size()); }
  const Axis& axis(int i) const { return axes_.at(i); }
  const std::vector<Axis>& axes() const noexcept { return axes_; }
  double spacing(int i) const { return axes_.at(i).spacing(); }
  std::size_t nodeCount() const noexcept { return count_; }
  std::size_t stride(int axis) const noexcept { return strides_[axis]; }

  std::array<int, kMaxDimension> multiIndex(std::size_t node) const noexcept;
  std::size_t linearIndex(std::span<const int> index) const noexcept;
  void coordinates(std::size_t node, std::span<double> out) const noexcept;
  Point point(std::size_t node) const;

  // Per-axis coordinate of every node, laid out for Expr::evaluateBatch.
  std::vector<std::vector<double>> coordinateArrays() const;

  bool contains(std::span<const double> x, double slack = 0.0) const noexcept;
  bool onBoundary(std::size_t node) const noexcept;
  Point center() const;
  double volume() const noexcept;

  // Composite trapezoid weights; their sum equals volume().
  std::vector<double> trapezoidWeights() const;

  friend bool operator==(const GridSpec& a, const GridSpec& b);

 private:
  std::vector<Axis> axes_;
  std::array<std::size_t, kMaxDimension> strides_{};
  std::size_t count_ = 0;
};

class ScalarField {
 public:
  ScalarField() = default;
  // Throws InputError on a size mismatch or a non-finite value.
  ScalarField(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t node) const noexcept { return values_[node]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

// One covector (or, under Euclidean duality, one vector) per node; components
// stored contiguously per node.
class CovectorField {
 public:
  CovectorField() = default;
  CovectorField(GridSpec grid, std::vector<double> components);

  const GridSpec& grid() const noexcept { return grid_; }
  int dimension() const noexcept { return grid_.dimension(); }
  double operator()(std::size_t node, int axis) const noexcept {
    return components_[node * static_cast<std::size_t>(grid_.dimension()) + axis];
  }
  std::span<const double> at(std::size_t node) const noexcept {
    return std::span<const double>(components_).subspan(node * grid_.dimension(), grid_.dimension());
  }
  std::span<const double> components() const noexcept { return components_; }

 private:
  GridSpec grid_;
  std::vector<double> components_;
};

double integrate(const ScalarField& f);
// Trapezoid-rule L1 distance; grids must match.
double l1Distance(const ScalarField& a, const ScalarField& b);

// CSV with header x1..xn,value (or A1..An), 17 significant digits.
void writeCsv(std::ostream& os, const ScalarField& f);
void writeCsv(std::ostream& os, const CovectorField& f);

}  // namespace entrans
