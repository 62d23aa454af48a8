#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "divisim/distributions.hpp"

namespace divisim {

/// mu0 = E[exp(-X)] and mu1 = E[X exp(-X)].
struct ShiftedMoments {
  double mu0;
  double mu1;
};

struct FitReport {
  Distribution fitted;
  double objectiveValue = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> gridUsed;
  /// Objective after each accepted optimizer iteration of the winning restart.
  std::vector<double> objectiveTrace;
};

/// Strictly increasing positive transform arguments t_1 < ... < t_m.
class LaplaceGrid {
 public:
  explicit LaplaceGrid(std::vector<double> points);
  /// `count` points spaced geometrically over [lo, hi].
  static LaplaceGrid geometric(double lo, double hi, std::size_t count);

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<double> points_;
};

/// l(alpha, s, x) = -ln Gamma(alpha) - alpha ln s + (alpha - 1) ln x - x / s.
double gammaLogLikelihood(const GammaParams& params, double x);

/// Gamma maximum likelihood. Solves ln a - digamma(a) = ln(mean x) - mean(ln x)
/// by safeguarded Newton, then scale = mean / shape.
FitReport fitGammaMle(std::span<const double> sample);

ShiftedMoments estimateShiftedMoments(std::span<const double> sample);

/// The Gamma with (1 + s)^-a = mu0 and a s (1 + s)^(-a-1) = mu1.
FitReport fitGammaShiftedMoments(const ShiftedMoments& m);

/// ln(mean exp(-t x_i)), shifted by the sample minimum for stability.
double empiricalLogLaplace(std::span<const double> sample, double t);

struct GgcFitOptions {
  std::size_t restarts = 10;
  std::size_t maxEvaluations = 100000;
  /// An iteration improving the objective by less than this ends a restart.
  double improvementTolerance = 1e-15;
  /// Per-point weights of the least-squares objective; empty means
  /// 1 / psi_emp(t_k)^2, i.e. relative residuals.
  std::vector<double> weights;
  /// Restarts run on this many threads. Results do not depend on it.
  std::size_t threads = 1;
};

/// Default transform grid: 4 * nAtoms points spaced geometrically over
/// [1 / q(0.99999), 1 / q(0.01)] of the sample.
LaplaceGrid defaultLaplaceGrid(std::span<const double> sample, std::size_t nAtoms);

/// Gamma convolution with nAtoms atoms minimising
/// sum_k w_k (psi_model(t_k) - psi_emp(t_k))^2 over log-parameters, with
/// seed-derived multi-start BFGS. An exhausted evaluation budget is reported
/// through converged = false rather than thrown.
FitReport fitGammaConvolution(std::span<const double> sample, std::size_t nAtoms,
                              const std::optional<LaplaceGrid>& grid, std::uint64_t seed,
                              const GgcFitOptions& options = {});

/// Number of atoms left after merging scales closer than relativeGap.
std::size_t countDistinctScales(const ThorinAtomicMeasure& measure, double relativeGap = 1e-6);

}  // namespace divisim
