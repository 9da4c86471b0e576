#include "entrans/maxent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "entrans/geometry.hpp"
#include "format.hpp"

namespace entrans {

void ConstraintSet::add(Expr expr, double lambda, std::optional<double> target) {
  if (expr.dimension() != dimension)
    throw InputError("constraint '" + expr.toString() + "' has dimension " + std::to_string(expr.dimension()) +
                     ", expected " + std::to_string(dimension));
  items.push_back({std::move(expr), lambda, target});
}

std::vector<double> ConstraintSet::lambdas() const {
  std::vector<double> out;
  for (const Constraint& c : items) out.push_back(c.lambda);
  return out;
}

Expr ConstraintSet::combinedPotential() const {
  Expr sum = Expr::constant(0.0, dimension);
  for (const Constraint& c : items) sum = sum + c.lambda * c.expr;
  return sum;
}

namespace {

void requireSameGrid(const ScalarField& p, const ConstraintSet& cs) {
  if (!cs.items.empty() && cs.dimension != p.grid().dimension())
    throw InputError("constraint dimension does not match the density grid");
}

// lambda-weighted potential sum_k lambda_k J_k per node, accumulated in
// constraint order.
std::vector<double> weightedPotential(const ConstraintSet& cs, const GridSpec& g) {
  std::vector<double> v(g.nodeCount(), 0.0);
  for (const Constraint& c : cs.items) {
    const ScalarField j = sampleScalar(c.expr, g);
    for (std::size_t n = 0; n < v.size(); ++n) v[n] += c.lambda * j[n];
  }
  return v;
}

}  // namespace

double entropyAction(const ScalarField& p, const ConstraintSet& cs) {
  requireSameGrid(p, cs);
  requireNormalized(p);
  const GridSpec& g = p.grid();
  const auto w = g.trapezoidWeights();
  double entropy = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n)
    if (p[n] >= 1e-300) entropy -= w[n] * p[n] * std::log(p[n]);
  double constraintTerm = 0.0;
  for (const Constraint& c : cs.items) {
    const ScalarField j = sampleScalar(c.expr, g);
    double moment = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) moment += w[n] * j[n] * p[n];
    constraintTerm += c.lambda * (moment - c.target.value_or(0.0));
  }
  return entropy - constraintTerm;
}

double elResidual(const ScalarField& p, const ConstraintSet& cs) {
  requireSameGrid(p, cs);
  const GridSpec& g = p.grid();
  std::vector<double> r(p.size());
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (!(p[n] > 0.0)) {
      std::ostringstream os;
      os << "density is not positive at node (";
      const Point x = g.point(n);
      for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << fmt17(x[i]);
      os << ")";
      throw InputError(os.str());
    }
    r[n] = -std::log(p[n]);
  }
  for (const Constraint& c : cs.items) {
    const ScalarField j = sampleScalar(c.expr, g);
    for (std::size_t n = 0; n < r.size(); ++n) r[n] -= c.lambda * j[n];
  }
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::abs(v - mean));
  return worst;
}

Density maxentDensity(const ConstraintSet& cs, const GridSpec& g) {
  if (!cs.items.empty() && cs.dimension != g.dimension())
    throw InputError("constraint dimension does not match the grid");
  Density d = densityFromLogWeights(g, weightedPotential(cs, g), Provenance::EulerLagrange);
  d.lambda = cs.lambdas();
  d.basepoint = g.center();
  return d;
}

// ---------------------------------------------------------------- fitting

SingularHessianError::SingularHessianError(std::vector<double> nullVector, double ratio)
    : SolverError([&] {
        std::ostringstream os;
        os << "singular Hessian: constraints are linearly dependent on the grid (eigenvalue ratio " << fmt17(ratio)
           << "); near-null vector [";
        for (std::size_t i = 0; i < nullVector.size(); ++i) os << (i ? ", " : "") << fmt17(nullVector[i]);
        os << "]";
        return os.str();
      }()),
      nullVector_(std::move(nullVector)) {}

namespace {

class Dual {
 public:
  Dual(const ConstraintSet& cs, const GridSpec& g) : weights_(g.trapezoidWeights()) {
    for (const Constraint& c : cs.items) {
      const ScalarField f = sampleScalar(c.expr, g);
      features_.emplace_back(f.values().begin(), f.values().end());
      targets_.push_back(*c.target);
    }
  }

  int size() const { return static_cast<int>(features_.size()); }

  // ln Z(lambda) + lambda . C
  double value(const Eigen::VectorXd& lambda) const {
    const auto v = exponent(lambda);
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) s += weights_[n] * std::exp(v[n] - m);
    return m + std::log(s) + lambda.dot(target());
  }

  // Moments E[J_k] and covariance under exp(-lambda . J) / Z.
  void moments(const Eigen::VectorXd& lambda, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) const {
    const auto v = exponent(lambda);
    const double m = *std::max_element(v.begin(), v.end());
    std::vector<double> q(v.size());
    double s = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
      q[n] = weights_[n] * std::exp(v[n] - m);
      s += q[n];
    }
    for (double& x : q) x /= s;
    const int k = size();
    mean = Eigen::VectorXd::Zero(k);
    for (int a = 0; a < k; ++a)
      for (std::size_t n = 0; n < q.size(); ++n) mean[a] += q[n] * features_[a][n];
    cov = Eigen::MatrixXd::Zero(k, k);
    for (int a = 0; a < k; ++a) {
      for (int b = a; b < k; ++b) {
        double c = 0.0;
        for (std::size_t n = 0; n < q.size(); ++n)
          c += q[n] * (features_[a][n] - mean[a]) * (features_[b][n] - mean[b]);
        cov(a, b) = cov(b, a) = c;
      }
    }
  }

  Eigen::VectorXd target() const { return Eigen::Map<const Eigen::VectorXd>(targets_.data(), size()); }

 private:
  std::vector<double> exponent(const Eigen::VectorXd& lambda) const {
    std::vector<double> v(weights_.size(), 0.0);
    for (int a = 0; a < size(); ++a)
      for (std::size_t n = 0; n < v.size(); ++n) v[n] -= lambda[a] * features_[a][n];
    return v;
  }

  std::vector<double> weights_;
  std::vector<std::vector<double>> features_;
  std::vector<double> targets_;
};

}  // namespace

FitResult fitMultipliers(const ConstraintSet& cs, const GridSpec& g, const FitOptions& opts) {
  if (!cs.items.empty() && cs.dimension != g.dimension())
    throw InputError("constraint dimension does not match the grid");
  for (const Constraint& c : cs.items) {
    if (!c.target) throw InputError("constraint '" + c.expr.toString() + "' has no target to fit");
    if (!std::isfinite(*c.target)) throw InputError("constraint '" + c.expr.toString() + "' has a non-finite target");
  }

  const Dual dual(cs, g);
  const int k = dual.size();
  const Eigen::VectorXd target = dual.target();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  FitReport report;
  double current = dual.value(lambda);
  for (int iter = 0;; ++iter) {
    dual.moments(lambda, mean, cov);
    const Eigen::VectorXd gradient = target - mean;
    const double residual = k ? gradient.cwiseAbs().maxCoeff() : 0.0;
    report.residualHistory.push_back(residual);
    report.dualHistory.push_back(current);
    report.iterations = iter;
    report.residual = residual;
    if (residual <= opts.tolerance) {
      report.converged = true;
      break;
    }
    if (iter >= opts.maxIterations) break;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double bottom = eig.eigenvalues()[0];
    if (!(top > 0.0) || bottom <= 1e-12 * top) {
      if (iter > 0) break;  // degenerate density, not dependent features
      const Eigen::VectorXd nv = eig.eigenvectors().col(0);
      throw SingularHessianError(std::vector<double>(nv.data(), nv.data() + nv.size()), top > 0.0 ? bottom / top : 0.0);
    }
    const Eigen::VectorXd step = cov.ldlt().solve(-gradient);

    // Halve until the dual does not increase beyond rounding.
    double t = 1.0;
    Eigen::VectorXd trial = lambda + step;
    double next = dual.value(trial);
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(current));
    while (!(next <= current + slack) && t > 1e-12) {
      t *= 0.5;
      trial = lambda + t * step;
      next = dual.value(trial);
    }
    if (!(next <= current + slack)) break;  // no descent left: stalled at rounding level
    lambda = trial;
    current = next;
  }

  ConstraintSet fitted = cs;
  for (int a = 0; a < k; ++a) fitted.items[a].lambda = lambda[a];
  report.lambda.assign(lambda.data(), lambda.data() + k);
  report.moments.assign(mean.data(), mean.data() + k);

  Density density = maxentDensity(fitted, g);
  return {std::move(report), std::move(density), std::move(fitted)};
}

// ---------------------------------------------------------------- gauge

GaugeResult gaugeTransform(const Density& p, const ConstraintSet& cs, const Expr& gauge, double gaugeLambda) {
  const GridSpec& g = p.grid();
  if (gauge.dimension() != g.dimension()) throw InputError("gauge potential dimension does not match the grid");
  const ScalarField j = sampleScalar(gauge, g);

  GaugeResult out;
  out.constraints = cs;
  out.constraints.dimension = g.dimension();
  out.constraints.add(gauge, gaugeLambda);

  bool identity = true;
  for (std::size_t n = 0; n < j.size(); ++n) identity &= gaugeLambda * j[n] == 0.0;
  if (identity) {
    out.density = p;
  } else {
    std::vector<double> potential(p.field.size());
    for (std::size_t n = 0; n < potential.size(); ++n) {
      if (!(p[n] > 0.0)) throw InputError("gauge transformation needs a strictly positive density");
      potential[n] = -std::log(p[n]) + gaugeLambda * j[n];
    }
    Density q = densityFromLogWeights(g, std::move(potential), Provenance::GaugeTransformed);
    q.logZ += p.logZ;
    q.Z = std::exp(q.logZ);
    q.basepoint = p.basepoint;
    out.density = std::move(q);
  }
  out.density.provenance = Provenance::GaugeTransformed;
  out.density.lambda = out.constraints.lambdas();
  return out;
}

std::vector<Density> perturbedCandidates(const Density& p, int count) {
  if (count < 1) throw InputError("candidate family must not be empty");
  const GridSpec& g = p.grid();
  const int d = g.dimension();
  const int middle = count / 2;
  std::vector<Density> out;
  Point x(d);
  for (int c = 0; c < count; ++c) {
    if (c == middle) {
      out.push_back(p);
      continue;
    }
    const int j = c < middle ? c + 1 : c;  // 1..count-1
    const int axis = (j - 1) % d;
    const bool quadratic = ((j - 1) / d) % 2 == 1;
    const double amplitude = 0.05 * j * (j % 2 ? 1.0 : -1.0);
    std::vector<double> potential(p.field.size());
    for (std::size_t n = 0; n < potential.size(); ++n) {
      g.coordinates(n, x);
      const double shape = quadratic ? x[axis] * x[axis] : x[axis];
      potential[n] = -std::log(p[n]) + amplitude * shape;
    }
    Density q = densityFromLogWeights(g, std::move(potential), p.provenance);
    q.lambda = p.lambda;
    q.basepoint = p.basepoint;
    out.push_back(std::move(q));
  }
  return out;
}

GaugeInvarianceReport gaugeInvarianceCheck(const Density& p, const ConstraintSet& cs, const Expr& gauge,
                                           double gaugeLambda, int candidates) {
  GaugeInvarianceReport report;
  const GaugeResult transformed = gaugeTransform(p, cs, gauge, gaugeLambda);
  report.residualBefore = elResidual(p, cs);
  report.residualAfter = elResidual(transformed.density, transformed.constraints);

  for (const Density& q : perturbedCandidates(p, candidates)) {
    report.actionsBefore.push_back(entropyAction(q, cs));
    const GaugeResult moved = gaugeTransform(q, cs, gauge, gaugeLambda);
    report.actionsAfter.push_back(entropyAction(moved.density, moved.constraints));
  }
  auto argmax = [](const std::vector<double>& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  report.winnerBefore = argmax(report.actionsBefore);
  report.winnerAfter = argmax(report.actionsAfter);
  report.invariant = report.winnerBefore == report.winnerAfter &&
                     std::abs(report.residualBefore - report.residualAfter) <= 1e-8;
  return report;
}

}  // namespace entrans
