#include "divisim/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace divisim::optimize {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double maxAbs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

BfgsResult minimizeBfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options) {
  const std::size_t n = x0.size();
  BfgsResult result;
  result.x = std::move(x0);

  std::vector<double> grad(n), gradNew(n), xNew(n), dir(n), step(n), dgrad(n), hy(n);
  // Row-major inverse Hessian approximation, starts at identity.
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;

  double fx = f(result.x, grad);
  ++result.evaluations;
  if (!std::isfinite(fx)) {
    result.value = fx;
    return result;
  }
  bool rescaled = false;
  int stalls = 0;

  while (result.evaluations < options.maxEvaluations) {
    if (maxAbs(grad) < options.gradientTolerance) {
      result.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s -= h[i * n + j] * grad[j];
      dir[i] = s;
    }
    double slope = dot(dir, grad);
    if (!(slope < 0.0)) {
      // Lost descent: reset to steepest descent.
      std::fill(h.begin(), h.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        h[i * n + i] = 1.0;
        dir[i] = -grad[i];
      }
      slope = -dot(grad, grad);
      rescaled = false;
    }

    double alpha = 1.0;
    double fNew = fx;
    bool accepted = false;
    while (result.evaluations < options.maxEvaluations) {
      for (std::size_t i = 0; i < n; ++i) xNew[i] = result.x[i] + alpha * dir[i];
      fNew = f(xNew, gradNew);
      ++result.evaluations;
      if (std::isfinite(fNew) && fNew <= fx + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
      if (alpha < 1e-20) break;
    }
    if (!accepted) {
      // No progress possible along any scaled direction.
      result.converged = alpha < 1e-20;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      step[i] = xNew[i] - result.x[i];
      dgrad[i] = gradNew[i] - grad[i];
    }
    const double improvement = fx - fNew;
    result.x.swap(xNew);
    grad.swap(gradNew);
    fx = fNew;
    ++result.iterations;
    if (options.recordTrace) result.trace.push_back(fx);

    const double sy = dot(step, dgrad);
    if (sy > 1e-300) {
      if (!rescaled) {
        // Shanno-Phua scaling of the initial inverse Hessian.
        const double scale = sy / dot(dgrad, dgrad);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) h[i * n + j] = (i == j) ? scale : 0.0;
        }
        rescaled = true;
      }
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += h[i * n + j] * dgrad[j];
        hy[i] = s;
      }
      const double yhy = dot(dgrad, hy);
      const double rho = 1.0 / sy;
      const double coef = (1.0 + yhy * rho) * rho;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += coef * step[i] * step[j] - rho * (hy[i] * step[j] + step[i] * hy[j]);
        }
      }
    }

    // Two consecutive small improvements end the run; a single one can be a
    // short line-search step.
    stalls = improvement < options.improvementTolerance ? stalls + 1 : 0;
    if (stalls >= 2) {
      result.converged = true;
      break;
    }
  }
  result.value = fx;
  return result;
}

}  // namespace divisim::optimize
