#include "entrans/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "entrans/parallel.hpp"
#include "format.hpp"

namespace entrans {

Connection Connection::exact(const Expr& potential, double scale) {
  Connection c;
  for (int i = 0; i < potential.dimension(); ++i) c.components_.push_back(potential.derivative(i));
  c.potential_ = potential;
  c.scale_ = scale;
  return c;
}

Connection Connection::fromComponents(std::vector<Expr> components, double scale) {
  if (components.empty()) throw InputError("a connection needs at least one component");
  for (const Expr& e : components)
    if (e.dimension() != static_cast<int>(components.size()))
      throw InputError("connection component '" + e.toString() + "' has dimension " +
                       std::to_string(e.dimension()) + ", expected " + std::to_string(components.size()));
  Connection c;
  c.components_ = std::move(components);
  c.scale_ = scale;
  return c;
}

double Connection::pairing(std::span<const double> x, std::span<const double> direction) const {
  double s = 0.0;
  for (int i = 0; i < dimension(); ++i)
    if (direction[i] != 0.0) s += components_[i].evaluate(x) * direction[i];
  return scale_ * s;
}

namespace {

// Gauss-Legendre nodes and weights on [0, 1].
constexpr std::array<double, 4> kGaussNode{0.5 - 0.43056815579702629, 0.5 - 0.16999052179242813,
                                           0.5 + 0.16999052179242813, 0.5 + 0.43056815579702629};
constexpr std::array<double, 4> kGaussWeight{0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
                                             0.17392742256872693};

double length(std::span<const double> d) {
  double s = 0.0;
  for (double v : d) s += v * v;
  return std::sqrt(s);
}

// Integral of A along the straight segment a -> b.
double segmentIntegral(const Connection& conn, std::span<const double> a, std::span<const double> b,
                       const QuadratureOptions& opts) {
  const int d = conn.dimension();
  std::vector<double> dirv(d), x(d);
  for (int i = 0; i < d; ++i) dirv[i] = b[i] - a[i];
  const double len = length(dirv);
  int panels = 1;
  if (std::isfinite(opts.maxPanelLength) && opts.maxPanelLength > 0.0)
    panels = std::max(1, static_cast<int>(std::ceil(len / opts.maxPanelLength)));
  auto at = [&](double t) {
    for (int i = 0; i < d; ++i) x[i] = a[i] + t * dirv[i];
    return conn.pairing(x, dirv);
  };
  double total = 0.0;
  const double w = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double t0 = p * w;
    if (opts.rule == Quadrature::Trapezoid) {
      total += 0.5 * w * (at(t0) + at(p + 1 == panels ? 1.0 : t0 + w));
    } else {
      double s = 0.0;
      for (int q = 0; q < 4; ++q) s += kGaussWeight[q] * at(t0 + w * kGaussNode[q]);
      total += w * s;
    }
  }
  return total;
}

void checkPath(const Connection& a, const Polyline& path) {
  validate(path, a.dimension());
}

template <class F>
auto withSegmentContext(std::size_t segment, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " on segment " + std::to_string(segment), e.subexpression());
  }
}

}  // namespace

double lineIntegral(const Connection& a, const Polyline& path, const QuadratureOptions& opts) {
  return parallelTransport(a, path, opts).integral;
}

TransportResult parallelTransport(const Connection& a, const Polyline& path, const QuadratureOptions& opts) {
  checkPath(a, path);
  TransportResult r;
  r.partialSums.reserve(path.segmentCount());
  for (std::size_t s = 0; s < path.segmentCount(); ++s) {
    r.integral += withSegmentContext(s, [&] { return segmentIntegral(a, path.segmentStart(s), path.segmentEnd(s), opts); });
    r.partialSums.push_back(r.integral);
  }
  r.factor = std::exp(-r.integral);
  return r;
}

double transportByOde(const Connection& a, const Polyline& path, int stepsPerSegment) {
  checkPath(a, path);
  if (stepsPerSegment < 1) throw InputError("transportByOde needs at least one step per segment");
  const int d = a.dimension();
  std::vector<double> dir(d), x(d);
  double s = 1.0;
  for (std::size_t seg = 0; seg < path.segmentCount(); ++seg) {
    const Point& p0 = path.segmentStart(seg);
    const Point& p1 = path.segmentEnd(seg);
    for (int i = 0; i < d; ++i) dir[i] = p1[i] - p0[i];
    auto rate = [&](double t) {
      for (int i = 0; i < d; ++i) x[i] = p0[i] + t * dir[i];
      return -a.pairing(x, dir);
    };
    const double h = 1.0 / stepsPerSegment;
    withSegmentContext(seg, [&] {
      for (int k = 0; k < stepsPerSegment; ++k) {
        const double t = k * h;
        const double k1 = rate(t) * s;
        const double k2 = rate(t + 0.5 * h) * (s + 0.5 * h * k1);
        const double k3 = rate(t + 0.5 * h) * (s + 0.5 * h * k2);
        const double k4 = rate(t + h) * (s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      return 0;
    });
  }
  return s;
}

double transportSpread(const Connection& a, std::span<const Polyline> paths, const QuadratureOptions& opts) {
  if (paths.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Polyline& p : paths) {
    const double integral = lineIntegral(a, p, opts);
    lo = std::min(lo, integral);
    hi = std::max(hi, integral);
  }
  // factor = exp(-I): (f_max - f_min) / f_min = exp(I_max - I_min) - 1
  return std::expm1(hi - lo);
}

std::vector<Polyline> randomPaths(const GridSpec& box, const Point& start, const Point& end, int k,
                                  std::uint64_t seed) {
  if (k < 2) throw InputError("path independence needs at least two paths");
  if (!box.contains(start) || !box.contains(end)) throw InputError("path endpoints must lie inside the box");
  if (start == end) throw InputError("path endpoints must differ");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> vertexCount(2, 16);
  std::vector<std::uniform_real_distribution<double>> coord;
  for (const Axis& ax : box.axes()) coord.emplace_back(ax.lower, ax.upper);

  std::vector<Polyline> paths;
  paths.push_back(Polyline{{start, end}, false});
  while (static_cast<int>(paths.size()) < k) {
    const int m = vertexCount(rng);
    Polyline p;
    p.vertices.push_back(start);
    for (int v = 1; v + 1 < m; ++v) {
      Point x(box.dimension());
      for (int i = 0; i < box.dimension(); ++i) x[i] = coord[i](rng);
      p.vertices.push_back(std::move(x));
    }
    p.vertices.push_back(end);
    paths.push_back(std::move(p));
  }
  return paths;
}

double pathIndependenceCheck(const Connection& a, const GridSpec& box, const Point& start, const Point& end, int k,
                             std::uint64_t seed, const QuadratureOptions& opts) {
  const auto paths = randomPaths(box, start, end, k, seed);
  return transportSpread(a, paths, opts);
}

Density buildDensityByTransport(const Connection& a, const GridSpec& g, std::optional<Point> basepoint,
                                double panelNodes) {
  if (a.dimension() != g.dimension()) throw InputError("connection and grid dimensions differ");
  const Point base = basepoint.value_or(g.center());
  if (!g.contains(base)) throw InputError("basepoint lies outside the grid box");

  double hmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.dimension(); ++i) hmin = std::min(hmin, g.spacing(i));
  const QuadratureOptions opts{Quadrature::Gauss4, panelNodes * hmin};

  std::vector<double> integrals(g.nodeCount());
  parallelFor(g.nodeCount(), [&](std::size_t begin, std::size_t end) {
    Point x(g.dimension());
    for (std::size_t n = begin; n < end; ++n) {
      g.coordinates(n, x);
      if (x == base) {
        integrals[n] = 0.0;
        continue;
      }
      try {
        integrals[n] = segmentIntegral(a, base, x, opts);
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " on the path to node " + std::to_string(n), e.subexpression());
      }
    }
  });

  Density d = densityFromLogWeights(g, std::move(integrals), Provenance::Transport);
  d.basepoint = base;
  d.lambda = {a.scale()};
  return d;
}

Density buildDensityByTransport(const Expr& potential, double lambda, const GridSpec& g,
                                std::optional<Point> basepoint) {
  return buildDensityByTransport(Connection::exact(potential, lambda), g, std::move(basepoint));
}

}  // namespace entrans
