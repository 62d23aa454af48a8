#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace divisim::optimize {

/// Objective value at x; writes the gradient into grad (same length as x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BfgsOptions {
  /// Stop when an accepted iteration lowers the objective by less than this.
  double improvementTolerance = 1e-12;
  double gradientTolerance = 1e-14;
  std::size_t maxEvaluations = 100000;
  /// Record the objective after every accepted iteration.
  bool recordTrace = false;
};

struct BfgsResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::vector<double> trace;
};

/// Quasi-Newton minimisation with a dense inverse-Hessian update and an
/// Armijo backtracking line search. The update is skipped when the curvature
/// condition fails, which keeps the inverse Hessian positive definite.
BfgsResult minimizeBfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options = {});

}  // namespace divisim::optimize
