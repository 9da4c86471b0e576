#pragma once

#include <iosfwd>
#include <vector>

#include "entrans/grid.hpp"

namespace entrans {

// Ordered vertex list; a closed polyline implicitly joins its last vertex back
// to the first.
struct Polyline {
  std::vector<Point> vertices;
  bool closed = false;

  std::size_t segmentCount() const noexcept {
    if (vertices.size() < 2) return 0;
    return closed ? vertices.size() : vertices.size() - 1;
  }
  const Point& segmentStart(std::size_t s) const { return vertices[s]; }
  const Point& segmentEnd(std::size_t s) const { return vertices[(s + 1) % vertices.size()]; }
};

// Throws InputError unless the polyline has >= 2 vertices of matching
// dimension and no two consecutive vertices coincide.
void validate(const Polyline& path, int dimension);

// Vertices concatenated; `b` must start where `a` ends (the joint is kept once).
Polyline concatenate(const Polyline& a, const Polyline& b);
Polyline reversed(const Polyline& p);

// x1,x2,... vertex rows, one block per curve separated by a blank line. Closed
// curves are written without repeating the first vertex.
void writePolylinesCsv(std::ostream& os, const std::vector<Polyline>& curves);

}  // namespace entrans
