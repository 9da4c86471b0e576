#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entrans/expr.hpp"
#include "entrans/grid.hpp"
#include "entrans/maxent.hpp"

namespace entrans {

// One constraint as written in the config: exactly one of lambda / target.
struct ConstraintSpec {
  std::string expr;
  std::optional<double> lambda;
  std::optional<double> target;
};

struct RunConfig {
  int dimension = 2;
  std::vector<double> lower{-5.0, -5.0};
  std::vector<double> upper{5.0, 5.0};
  std::vector<int> nodes{101, 101};

  std::vector<ConstraintSpec> constraints;
  std::vector<std::string> drift;  // componentwise override, empty if absent

  double tolerance = 1e-10;
  int maxIterations = 100;

  double dt = 1e-3;
  double endTime = 1.0;
  double diffusion = 1.0;
  std::size_t particles = 100000;
  std::uint64_t seed = 1;
  int sampleEvery = 100;

  std::vector<Point> path;
  bool closedPath = false;
  int paths = 8;
  double pathTolerance = 1e-8;

  double lambda = 1.0;  // certify: drift = -lambda grad J convention
  double curvatureTolerance = 1e-8;
  double fpTolerance = 1e-4;

  std::vector<double> levels;
  double step = 0.01;
  int maxSteps = 100000;

  std::string outputDir = "out";

  GridSpec grid() const;
  // Constraints parsed against `dimension`; fixed-lambda entries get their
  // lambda, fit entries start at 0.
  ConstraintSet constraintSet() const;
  std::vector<Expr> driftExprs() const;
};

// Sectioned key = value text; values are JSON when they parse as JSON and
// bare strings otherwise. '#' starts a comment line. Unknown keys are errors.
RunConfig parseConfig(const std::string& text);
RunConfig loadConfig(const std::string& path);

// Canonical text with every default resolved; parseConfig(echo(c)) == c.
std::string echoConfig(const RunConfig& c);

}  // namespace entrans
