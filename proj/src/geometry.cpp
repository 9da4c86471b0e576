#include "entrans/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "entrans/parallel.hpp"
#include "format.hpp"

namespace entrans {

namespace {

constexpr std::size_t kChunk = 4096;

std::string describe(std::span<const double> x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << fmt17(x[i]);
  os << ')';
  return os.str();
}

std::vector<double> evaluateOnGrid(const Expr& e, const GridSpec& g,
                                   const std::vector<std::vector<double>>& coords) {
  if (e.dimension() != g.dimension())
    throw InputError("expression dimension " + std::to_string(e.dimension()) + " does not match grid dimension " +
                     std::to_string(g.dimension()));
  std::vector<double> out(g.nodeCount());
  const std::size_t chunks = (g.nodeCount() + kChunk - 1) / kChunk;
  parallelFor(chunks, [&](std::size_t c0, std::size_t c1) {
    std::vector<double> scratch;
    std::array<const double*, GridSpec::kMaxDimension> ptr{};
    for (std::size_t c = c0; c < c1; ++c) {
      const std::size_t begin = c * kChunk;
      const std::size_t count = std::min(kChunk, g.nodeCount() - begin);
      for (int i = 0; i < g.dimension(); ++i) ptr[i] = coords[i].data() + begin;
      try {
        e.evaluateBatch(std::span<const double* const>(ptr.data(), g.dimension()), count, out.data() + begin,
                        scratch);
      } catch (const DomainError& err) {
        Point x(g.dimension());
        for (std::size_t n = begin; n < begin + count; ++n) {
          g.coordinates(n, x);
          try {
            e.evaluate(x);
          } catch (const DomainError& inner) {
            throw DomainError(std::string(inner.what()) + " at node " + describe(x), inner.subexpression());
          }
        }
        throw;
      }
    }
  });
  return out;
}

}  // namespace

ScalarField sampleScalar(const Expr& e, const GridSpec& g) {
  return ScalarField(g, evaluateOnGrid(e, g, g.coordinateArrays()));
}

CovectorField sampleCovector(const std::vector<Expr>& components, const GridSpec& g, double scale) {
  const int d = g.dimension();
  if (static_cast<int>(components.size()) != d)
    throw InputError("expected " + std::to_string(d) + " covector components, got " +
                     std::to_string(components.size()));
  const auto coords = g.coordinateArrays();
  std::vector<double> out(g.nodeCount() * d);
  for (int i = 0; i < d; ++i) {
    const auto v = evaluateOnGrid(components[i], g, coords);
    for (std::size_t n = 0; n < g.nodeCount(); ++n) out[n * d + i] = scale * v[n];
  }
  return CovectorField(g, std::move(out));
}

CovectorField connectionForm(const Expr& potential, const GridSpec& g, double scale) {
  std::vector<Expr> parts;
  for (int i = 0; i < potential.dimension(); ++i) parts.push_back(potential.derivative(i));
  return sampleCovector(parts, g, scale);
}

CurvatureReport curvature(const CovectorField& a, double tolerance) {
  CurvatureReport report;
  report.tolerance = tolerance;
  const GridSpec& g = a.grid();
  const int d = g.dimension();
  if (d < 2) return report;

  double worst = 0.0;
  for (std::size_t n = 0; n < g.nodeCount(); ++n) {
    if (g.onBoundary(n)) continue;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const std::size_t si = g.stride(i);
        const std::size_t sj = g.stride(j);
        const double diAj = (a(n + si, j) - a(n - si, j)) / (2.0 * g.spacing(i));
        const double djAi = (a(n + sj, i) - a(n - sj, i)) / (2.0 * g.spacing(j));
        worst = std::max(worst, std::abs(diAj - djAi));
      }
    }
  }
  report.maxCurvature = worst;
  report.flat = worst <= tolerance;
  return report;
}

namespace {

constexpr std::array<double, 4> kGaussNode{0.5 - 0.43056815579702629, 0.5 - 0.16999052179242813,
                                           0.5 + 0.16999052179242813, 0.5 + 0.43056815579702629};
constexpr std::array<double, 4> kGaussWeight{0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
                                             0.17392742256872693};

// Mean of component `comp` along the segment from `x` (with x[axis] at the
// lower end) of length `len` in direction `axis`.
double edgeMean(const Expr& comp, Point& x, int axis, double start, double len) {
  double s = 0.0;
  for (int q = 0; q < 4; ++q) {
    x[axis] = start + kGaussNode[q] * len;
    s += kGaussWeight[q] * comp.evaluate(x);
  }
  return s;
}

}  // namespace

CurvatureReport curvature(const std::vector<Expr>& components, const GridSpec& g, double scale, double tolerance) {
  const int d = g.dimension();
  if (static_cast<int>(components.size()) != d) throw InputError("curvature: one component per dimension required");
  for (const Expr& e : components)
    if (e.dimension() != d) throw InputError("curvature: component dimension does not match the grid");
  CurvatureReport report;
  report.tolerance = tolerance;
  if (d < 2) return report;

  const std::size_t nodes = g.nodeCount();
  std::vector<double> worst(nodes, 0.0);
  parallelFor(nodes, [&](std::size_t begin, std::size_t end) {
    Point x(d);
    for (std::size_t n = begin; n < end; ++n) {
      if (g.onBoundary(n)) continue;
      g.coordinates(n, x);
      const Point c = x;
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          const double hi = g.spacing(i), hj = g.spacing(j);
          x = c;
          x[i] = c[i] + hi;
          const double right = edgeMean(components[j], x, j, c[j] - hj, 2 * hj);
          x = c;
          x[i] = c[i] - hi;
          const double left = edgeMean(components[j], x, j, c[j] - hj, 2 * hj);
          x = c;
          x[j] = c[j] + hj;
          const double top = edgeMean(components[i], x, i, c[i] - hi, 2 * hi);
          x = c;
          x[j] = c[j] - hj;
          const double bottom = edgeMean(components[i], x, i, c[i] - hi, 2 * hi);
          const double curl = scale * ((right - left) / (2 * hi) - (top - bottom) / (2 * hj));
          worst[n] = std::max(worst[n], std::abs(curl));
        }
      }
    }
  });
  report.maxCurvature = *std::max_element(worst.begin(), worst.end());
  report.flat = report.maxCurvature <= tolerance;
  return report;
}

// ---------------------------------------------------------------- level sets

CriticalPointError::CriticalPointError(const Point& where, double gradientNorm)
    : SolverError("critical point encountered at " + describe(where) + " (|grad J| = " + fmt17(gradientNorm) + ")"),
      where_(where) {}

double hessianBound(const Expr& potential, std::span<const double> x) {
  double s = 0.0;
  for (int i = 0; i < potential.dimension(); ++i) {
    const Expr di = potential.derivative(i);
    for (int j = 0; j < potential.dimension(); ++j) {
      const double h = di.derivative(j).evaluate(x);
      s += h * h;
    }
  }
  return std::sqrt(s);
}

namespace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }

class LevelTracer {
 public:
  LevelTracer(const Expr& j, const GridSpec& g, double level, double step, int maxSteps)
      : j_(j), dx_(j.derivative(0)), dy_(j.derivative(1)), g_(g), level_(level), step_(step), maxSteps_(maxSteps) {}

  std::vector<Polyline> run() {
    const auto seeds = findSeeds();
    if (seeds.empty())
      throw SeedNotFoundError("no grid edge brackets level " + fmt17(level_) + " of '" + j_.toString() + "'");
    std::vector<Polyline> curves;
    for (Vec2 seed : seeds) {
      if (covered(seed)) continue;
      Polyline curve = traceFrom(project(seed));
      remember(curve);
      curves.push_back(std::move(curve));
    }
    return curves;
  }

 private:
  double value(Vec2 p) const {
    const std::array<double, 2> x{p.x, p.y};
    return j_.evaluate(x);
  }

  Vec2 gradient(Vec2 p) const {
    const std::array<double, 2> x{p.x, p.y};
    Vec2 gr{dx_.evaluate(x), dy_.evaluate(x)};
    const double n = norm(gr);
    if (n < kCriticalGradient) throw CriticalPointError(Point{p.x, p.y}, n);
    return gr;
  }

  Vec2 tangent(Vec2 p, double sign) const {
    const Vec2 gr = gradient(p);
    const double n = norm(gr);
    return {-sign * gr.y / n, sign * gr.x / n};
  }

  Vec2 project(Vec2 p) const {
    const double tol = 1e-14 * (1.0 + std::abs(level_));
    for (int it = 0; it < 20; ++it) {
      const double r = value(p) - level_;
      if (std::abs(r) <= tol) break;
      const Vec2 gr = gradient(p);
      p = p - (r / (gr.x * gr.x + gr.y * gr.y)) * gr;
    }
    return p;
  }

  bool inside(Vec2 p) const {
    const std::array<double, 2> x{p.x, p.y};
    return g_.contains(x);
  }

  // Point where the segment a->b (a inside) leaves the box.
  Vec2 clip(Vec2 a, Vec2 b) const {
    double t = 1.0;
    const std::array<double, 2> pa{a.x, a.y};
    const std::array<double, 2> pb{b.x, b.y};
    for (int i = 0; i < 2; ++i) {
      const Axis& ax = g_.axis(i);
      const double d = pb[i] - pa[i];
      if (pb[i] > ax.upper && d > 0.0) t = std::min(t, (ax.upper - pa[i]) / d);
      if (pb[i] < ax.lower && d < 0.0) t = std::min(t, (ax.lower - pa[i]) / d);
    }
    Vec2 q = a + std::max(t, 0.0) * (b - a);
    q.x = std::clamp(q.x, g_.axis(0).lower, g_.axis(0).upper);
    q.y = std::clamp(q.y, g_.axis(1).lower, g_.axis(1).upper);
    return q;
  }

  Vec2 rk4(Vec2 p, double sign) const {
    const double h = step_;
    const Vec2 k1 = tangent(p, sign);
    const Vec2 k2 = tangent(p + (0.5 * h) * k1, sign);
    const Vec2 k3 = tangent(p + (0.5 * h) * k2, sign);
    const Vec2 k4 = tangent(p + h * k3, sign);
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  struct Branch {
    std::vector<Vec2> points;  // excludes the seed
    bool closed = false;
  };

  Branch march(Vec2 start, double sign) const {
    Branch b;
    Vec2 p = start;
    double farthest = 0.0;
    for (int k = 0; k < maxSteps_; ++k) {
      Vec2 q = rk4(p, sign);
      if (inside(q)) q = project(q);
      if (!inside(q)) {
        const Vec2 e = clip(p, q);
        if (norm(e - p) > 1e-12 * step_) b.points.push_back(e);
        return b;
      }
      const double back = norm(q - start);
      if (farthest > 2.0 * step_ && back <= step_) {
        if (back > 0.5 * step_) b.points.push_back(q);
        b.closed = true;
        return b;
      }
      farthest = std::max(farthest, back);
      b.points.push_back(q);
      p = q;
    }
    return b;
  }

  Polyline traceFrom(Vec2 seed) const {
    Polyline out;
    Branch fwd = march(seed, 1.0);
    if (fwd.closed) {
      out.closed = true;
      out.vertices.push_back({seed.x, seed.y});
      for (Vec2 p : fwd.points) out.vertices.push_back({p.x, p.y});
      return out;
    }
    Branch bwd = march(seed, -1.0);
    for (auto it = bwd.points.rbegin(); it != bwd.points.rend(); ++it) out.vertices.push_back({it->x, it->y});
    out.vertices.push_back({seed.x, seed.y});
    for (Vec2 p : fwd.points) out.vertices.push_back({p.x, p.y});
    return out;
  }

  std::vector<Vec2> findSeeds() const {
    const ScalarField f = sampleScalar(j_, g_);
    const Axis& ax = g_.axis(0);
    const Axis& ay = g_.axis(1);
    std::vector<Vec2> seeds;
    auto edge = [&](int i0, int j0, int i1, int j1) {
      const std::array<int, 2> a{i0, j0};
      const std::array<int, 2> b{i1, j1};
      const double fa = f[g_.linearIndex(a)] - level_;
      const double fb = f[g_.linearIndex(b)] - level_;
      if ((fa > 0.0 && fb > 0.0) || (fa < 0.0 && fb < 0.0)) return;
      if (fa == 0.0 && fb == 0.0) {
        seeds.push_back({ax.coordinate(i0), ay.coordinate(j0)});
        return;
      }
      const double t = fa / (fa - fb);
      const Vec2 pa{ax.coordinate(i0), ay.coordinate(j0)};
      const Vec2 pb{ax.coordinate(i1), ay.coordinate(j1)};
      seeds.push_back(pa + t * (pb - pa));
    };
    for (int i = 0; i < ax.nodes; ++i) {
      for (int j = 0; j < ay.nodes; ++j) {
        if (i + 1 < ax.nodes) edge(i, j, i + 1, j);
        if (j + 1 < ay.nodes) edge(i, j, i, j + 1);
      }
    }
    return seeds;
  }

  std::pair<int, int> cellOf(Vec2 p) const {
    const Axis& ax = g_.axis(0);
    const Axis& ay = g_.axis(1);
    const int i = std::clamp(static_cast<int>(std::floor((p.x - ax.lower) / ax.spacing())), 0, ax.nodes - 2);
    const int j = std::clamp(static_cast<int>(std::floor((p.y - ay.lower) / ay.spacing())), 0, ay.nodes - 2);
    return {i, j};
  }

  void remember(const Polyline& c) {
    for (std::size_t s = 0; s < c.segmentCount(); ++s) {
      const Vec2 a{c.segmentStart(s)[0], c.segmentStart(s)[1]};
      const Vec2 b{c.segmentEnd(s)[0], c.segmentEnd(s)[1]};
      buckets_[cellOf(a)].push_back({a, b});
      if (cellOf(b) != cellOf(a)) buckets_[cellOf(b)].push_back({a, b});
    }
    if (c.vertices.size() == 1) {
      const Vec2 a{c.vertices[0][0], c.vertices[0][1]};
      buckets_[cellOf(a)].push_back({a, a});
    }
  }

  bool covered(Vec2 p) const {
    const double radius = std::max(g_.spacing(0), g_.spacing(1));
    const auto [ci, cj] = cellOf(p);
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const auto it = buckets_.find({ci + di, cj + dj});
        if (it == buckets_.end()) continue;
        for (const auto& [a, b] : it->second) {
          const Vec2 ab = b - a;
          const double len2 = ab.x * ab.x + ab.y * ab.y;
          double t = len2 > 0.0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          if (norm(p - (a + t * ab)) <= radius) return true;
        }
      }
    }
    return false;
  }

  const Expr& j_;
  Expr dx_;
  Expr dy_;
  const GridSpec& g_;
  double level_;
  double step_;
  int maxSteps_;
  std::map<std::pair<int, int>, std::vector<std::pair<Vec2, Vec2>>> buckets_;
};

}  // namespace

std::vector<Polyline> traceLevelSet(const Expr& potential, const GridSpec& g, double level, double step,
                                    int maxSteps) {
  if (g.dimension() != 2 || potential.dimension() != 2)
    throw InputError("level-set tracing is available in two dimensions only");
  if (!(step > 0.0) || maxSteps < 1) throw InputError("level-set tracing needs step > 0 and maxSteps >= 1");
  return LevelTracer(potential, g, level, step, maxSteps).run();
}

// ---------------------------------------------------------------- splitting

FieldSplit splitField(const CovectorField& v, const CovectorField& a) {
  if (!(v.grid() == a.grid())) throw InputError("splitField: fields live on different grids");
  const int d = a.dimension();
  const std::size_t nodes = a.grid().nodeCount();
  std::vector<double> horizontal(nodes * d);
  std::vector<double> vertical(nodes * d, 0.0);
  for (std::size_t n = 0; n < nodes; ++n) {
    const auto an = a.at(n);
    const auto vn = v.at(n);
    double norm2 = 0.0;
    for (double c : an) norm2 += c * c;
    const double len = std::sqrt(norm2);
    if (len >= 1e-12) {
      double dot = 0.0;
      for (int i = 0; i < d; ++i) dot += vn[i] * an[i];
      const double coef = dot / norm2;
      for (int i = 0; i < d; ++i) vertical[n * d + i] = coef * an[i];
    }
    for (int i = 0; i < d; ++i) horizontal[n * d + i] = vn[i] - vertical[n * d + i];
  }
  return {CovectorField(a.grid(), std::move(horizontal)), CovectorField(a.grid(), std::move(vertical))};
}

// ---------------------------------------------------------------- polylines

void validate(const Polyline& path, int dimension) {
  if (path.vertices.size() < 2) throw InputError("a path needs at least two vertices");
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    if (static_cast<int>(path.vertices[i].size()) != dimension)
      throw InputError("path vertex " + std::to_string(i) + " has wrong dimension");
    for (double c : path.vertices[i])
      if (!std::isfinite(c)) throw InputError("path vertex " + std::to_string(i) + " is not finite");
  }
  for (std::size_t s = 0; s < path.segmentCount(); ++s)
    if (path.segmentStart(s) == path.segmentEnd(s))
      throw InputError("path segment " + std::to_string(s) + " has zero length");
}

Polyline concatenate(const Polyline& a, const Polyline& b) {
  if (a.vertices.empty()) return b;
  if (b.vertices.empty()) return a;
  if (a.vertices.back() != b.vertices.front()) throw InputError("concatenate: paths do not share an endpoint");
  Polyline out{a.vertices, false};
  out.vertices.insert(out.vertices.end(), b.vertices.begin() + 1, b.vertices.end());
  return out;
}

Polyline reversed(const Polyline& p) {
  Polyline out{std::vector<Point>(p.vertices.rbegin(), p.vertices.rend()), p.closed};
  return out;
}

void writePolylinesCsv(std::ostream& os, const std::vector<Polyline>& curves) {
  const int d = curves.empty() || curves.front().vertices.empty() ? 2
                                                                   : static_cast<int>(curves.front().vertices[0].size());
  for (int i = 0; i < d; ++i) os << 'x' << (i + 1) << (i + 1 < d ? ',' : '\n');
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (c) os << '\n';
    for (const Point& v : curves[c].vertices)
      for (int i = 0; i < d; ++i) os << fmt17(v[i]) << (i + 1 < d ? ',' : '\n');
  }
}

}  // namespace entrans
