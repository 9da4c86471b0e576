#pragma once

#include <optional>
#include <vector>

#include "entrans/density.hpp"
#include "entrans/expr.hpp"
#include "entrans/grid.hpp"

namespace entrans {

struct Constraint {
  Expr expr;
  double lambda = 0.0;
  std::optional<double> target;  // C_k; absent for fixed-multiplier constraints
};

struct ConstraintSet {
  int dimension = 1;
  std::vector<Constraint> items;

  // Throws InputError when the expression dimension differs.
  void add(Expr expr, double lambda, std::optional<double> target = std::nullopt);
  std::vector<double> lambdas() const;
  // sum_k lambda_k J_k
  Expr combinedPotential() const;
  bool empty() const noexcept { return items.empty(); }
};

// S[p] = -int p ln p - sum_k lambda_k (int J_k p - C_k), trapezoid rule. A
// missing target counts as C_k = 0. Nodes with p < 1e-300 contribute nothing
// to p ln p. Throws InputError when p is not normalized to 1e-8.
double entropyAction(const ScalarField& p, const ConstraintSet& cs);
inline double entropyAction(const Density& p, const ConstraintSet& cs) { return entropyAction(p.field, cs); }

// max_x |r(x) - mean r| with r = -ln p - sum_k lambda_k J_k; zero exactly when
// p is proportional to exp(-sum lambda_k J_k). Throws InputError on a
// non-positive node.
double elResidual(const ScalarField& p, const ConstraintSet& cs);
inline double elResidual(const Density& p, const ConstraintSet& cs) { return elResidual(p.field, cs); }

// exp(-sum lambda_k J_k) / Z on the grid, computed directly.
Density maxentDensity(const ConstraintSet& cs, const GridSpec& g);

struct FitOptions {
  double tolerance = 1e-10;  // on max_k |E[J_k] - C_k|
  int maxIterations = 100;
};

struct FitReport {
  std::vector<double> lambda;
  std::vector<double> moments;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residualHistory;  // one entry per evaluated iterate
  std::vector<double> dualHistory;
};

struct FitResult {
  FitReport report;
  Density density;
  ConstraintSet constraints;  // input with fitted multipliers filled in
};

class SingularHessianError : public SolverError {
 public:
  SingularHessianError(std::vector<double> nullVector, double ratio);
  const std::vector<double>& nullVector() const noexcept { return nullVector_; }

 private:
  std::vector<double> nullVector_;
};

// Dual Newton on lambda -> ln Z(lambda) + sum_k lambda_k C_k starting from
// lambda = 0, with step halving until the dual decreases. Moments and Z use
// the trapezoid rule on `g`. Every constraint needs a target.
FitResult fitMultipliers(const ConstraintSet& cs, const GridSpec& g, const FitOptions& opts = {});

struct GaugeResult {
  Density density;
  ConstraintSet constraints;
};

// p' proportional to exp(-lambda' J') p, with the constraint (J', lambda')
// appended. A transformation that vanishes on every node returns p unchanged.
GaugeResult gaugeTransform(const Density& p, const ConstraintSet& cs, const Expr& gauge, double gaugeLambda);

struct GaugeInvarianceReport {
  double residualBefore = 0.0;
  double residualAfter = 0.0;
  std::vector<double> actionsBefore;
  std::vector<double> actionsAfter;
  int winnerBefore = -1;
  int winnerAfter = -1;
  bool invariant = false;  // same winner and residuals within 1e-8
};

// Candidate family for the invariance check: `p` itself at the middle index
// and count - 1 multiplicative perturbations of it around that index.
std::vector<Density> perturbedCandidates(const Density& p, int count = 5);

// `p` should be the maxent solution for `cs`.
GaugeInvarianceReport gaugeInvarianceCheck(const Density& p, const ConstraintSet& cs, const Expr& gauge,
                                           double gaugeLambda, int candidates = 5);

}  // namespace entrans
