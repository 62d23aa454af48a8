#include "divisim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "divisim/diagnostics.hpp"
#include "divisim/errors.hpp"
#include "divisim/optimize.hpp"

namespace divisim {

namespace {

void requireNonEmpty(std::span<const double> sample) {
  if (sample.empty()) fail(ErrorCode::EmptySample, "sample has no values");
}

void requirePositive(std::span<const double> sample) {
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!(sample[i] > 0.0) || !std::isfinite(sample[i])) {
      fail(ErrorCode::NonPositiveSample, fmt::format("entry {} is {}", i, sample[i]));
    }
  }
}

}  // namespace

LaplaceGrid::LaplaceGrid(std::vector<double> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i] > 0.0) || !std::isfinite(points_[i])) {
      fail(ErrorCode::DomainError, fmt::format("grid point {} is not positive", points_[i]));
    }
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      fail(ErrorCode::DomainError, "grid points must be strictly increasing");
    }
  }
}

LaplaceGrid LaplaceGrid::geometric(double lo, double hi, std::size_t count) {
  if (count == 0) return LaplaceGrid({});
  if (count == 1) return LaplaceGrid({lo});
  std::vector<double> pts(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) pts[k] = lo * std::exp(step * static_cast<double>(k));
  pts.back() = hi;
  return LaplaceGrid(std::move(pts));
}

// ---------------------------------------------------------------------------
// Gamma by maximum likelihood

double gammaLogLikelihood(const GammaParams& params, double x) {
  if (!(x > 0.0)) fail(ErrorCode::DomainError, fmt::format("log-likelihood needs x > 0, got {}", x));
  return -std::lgamma(params.shape) - params.shape * std::log(params.scale) +
         (params.shape - 1.0) * std::log(x) - x / params.scale;
}

FitReport fitGammaMle(std::span<const double> sample) {
  requireNonEmpty(sample);
  requirePositive(sample);
  if (sample.size() < 2) fail(ErrorCode::DegenerateSample, "need at least two observations");

  long double sum = 0.0L, sumLog = 0.0L;
  for (double x : sample) {
    sum += x;
    sumLog += std::log(static_cast<long double>(x));
  }
  const auto n = static_cast<long double>(sample.size());
  const double meanX = static_cast<double>(sum / n);
  const double rhs = static_cast<double>(std::log(sum / n) - sumLog / n);
  if (!(rhs > 0.0)) {
    fail(ErrorCode::DegenerateSample,
         "ln(mean) - mean(ln x) is not positive; the shape estimate diverges");
  }

  // Minka's starting point, then Newton on ln a - digamma(a) = rhs.
  double shape = (3.0 - rhs + std::sqrt((rhs - 3.0) * (rhs - 3.0) + 24.0 * rhs)) / (12.0 * rhs);
  bool converged = false;
  std::size_t it = 0;
  for (; it < 200; ++it) {
    const double f = std::log(shape) - boost::math::digamma(shape) - rhs;
    const double df = 1.0 / shape - boost::math::trigamma(shape);
    double next = shape - f / df;
    if (!(next > 0.0) || !std::isfinite(next)) next = 0.5 * shape;
    const double change = std::abs(next - shape);
    shape = next;
    if (change < 1e-10 * shape) {
      converged = true;
      ++it;
      break;
    }
  }

  FitReport report;
  report.fitted = Distribution::gamma(shape, meanX / shape);
  report.objectiveValue = std::abs(std::log(shape) - boost::math::digamma(shape) - rhs);
  report.iterations = it;
  report.converged = converged;
  return report;
}

// ---------------------------------------------------------------------------
// Gamma by shifted moments

ShiftedMoments estimateShiftedMoments(std::span<const double> sample) {
  requireNonEmpty(sample);
  long double s0 = 0.0L, s1 = 0.0L;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double x = sample[i];
    if (!(x >= 0.0)) fail(ErrorCode::NonPositiveSample, fmt::format("entry {} is {}", i, x));
    const double e = std::exp(-x);
    s0 += e;
    s1 += x * e;
  }
  const auto n = static_cast<long double>(sample.size());
  return {static_cast<double>(s0 / n), static_cast<double>(s1 / n)};
}

FitReport fitGammaShiftedMoments(const ShiftedMoments& m) {
  if (!(m.mu0 > 0.0 && m.mu0 < 1.0) || !(m.mu1 > 0.0) || !std::isfinite(m.mu1)) {
    fail(ErrorCode::DomainError,
         fmt::format("need 0 < mu0 < 1 and mu1 > 0, got ({}, {})", m.mu0, m.mu1));
  }
  // With a = -ln(mu0) / ln(1 + s), the second equation reduces to
  // g(s) = s / ((1 + s) ln(1 + s)) = mu1 / (mu0 (-ln mu0)), g decreasing 1 -> 0.
  const double logMu0 = std::log(m.mu0);
  const double target = m.mu1 / (m.mu0 * -logMu0);
  auto g = [](double s) { return s / ((1.0 + s) * std::log1p(s)); };
  auto h = [&](double s) { return g(s) - target; };

  if (!(target < 1.0)) {
    fail(ErrorCode::Infeasible,
         fmt::format("no Gamma attains (mu0, mu1) = ({}, {})", m.mu0, m.mu1));
  }
  double lo = 0.0;
  double hi = 1.0;
  std::size_t growth = 0;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 10.0;
    ++growth;
    if (hi > 1e12) {
      fail(ErrorCode::Infeasible,
           fmt::format("bracketing failed for (mu0, mu1) = ({}, {})", m.mu0, m.mu1));
    }
  }

  double scale = hi;
  std::uintmax_t iters = 200;
  if (h(hi) != 0.0) {
    // h(0+) = 1 - target > 0, evaluate the left end slightly inside.
    const double left = lo > 0.0 ? lo : std::min(1e-300, hi);
    const double hLeft = lo > 0.0 ? h(lo) : 1.0 - target;
    const auto bracket = boost::math::tools::toms748_solve(
        h, left, hi, hLeft, h(hi), boost::math::tools::eps_tolerance<double>(52), iters);
    scale = 0.5 * (bracket.first + bracket.second);
  }
  const double shape = -logMu0 / std::log1p(scale);

  const double r0 = std::abs(std::pow(1.0 + scale, -shape) - m.mu0);
  const double r1 = std::abs(shape * scale * std::pow(1.0 + scale, -shape - 1.0) - m.mu1);

  FitReport report;
  report.fitted = Distribution::gamma(shape, scale);
  report.objectiveValue = std::max(r0, r1);
  report.iterations = growth + static_cast<std::size_t>(iters);
  report.converged = report.objectiveValue < 1e-10;
  return report;
}

// ---------------------------------------------------------------------------
// Gamma convolutions by log-Laplace least squares

double empiricalLogLaplace(std::span<const double> sample, double t) {
  requireNonEmpty(sample);
  if (!(t > 0.0)) fail(ErrorCode::DomainError, fmt::format("t must be positive, got {}", t));
  const double lo = *std::min_element(sample.begin(), sample.end());
  long double acc = 0.0L;
  for (double x : sample) acc += std::exp(-t * (x - lo));
  return -t * lo + static_cast<double>(std::log(acc / static_cast<long double>(sample.size())));
}

LaplaceGrid defaultLaplaceGrid(std::span<const double> sample, std::size_t nAtoms) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double qLo = empiricalQuantileSorted(sorted, 0.01);
  const double qHi = empiricalQuantileSorted(sorted, 0.99999);
  if (!(qLo > 0.0) || !(qHi > qLo)) {
    fail(ErrorCode::DegenerateSample, "sample quantile range is empty; cannot place a grid");
  }
  return LaplaceGrid::geometric(1.0 / qHi, 1.0 / qLo, 4 * nAtoms);
}

std::size_t countDistinctScales(const ThorinAtomicMeasure& measure, double relativeGap) {
  const auto& atoms = measure.atoms();
  if (atoms.empty()) return 0;
  std::size_t count = 1;
  double anchor = atoms.front().scale;
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if ((atoms[i].scale - anchor) > relativeGap * anchor) {
      ++count;
      anchor = atoms[i].scale;
    }
  }
  return count;
}

namespace {

struct RestartOutcome {
  optimize::BfgsResult run;
  ThorinAtomicMeasure measure;
  std::size_t distinct = 0;
};

class LogLaplaceObjective {
 public:
  LogLaplaceObjective(std::vector<double> grid, std::vector<double> target, std::vector<double> weights,
                      std::size_t nAtoms)
      : grid_(std::move(grid)), target_(std::move(target)), weights_(std::move(weights)), n_(nAtoms) {}

  // x = (ln shape_1..n, ln scale_1..n).
  double operator()(std::span<const double> x, std::span<double> grad) const {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> shape(n_), scale(n_), logTerm(n_), ratio(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      shape[i] = std::exp(x[i]);
      scale[i] = std::exp(x[n_ + i]);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const double t = grid_[k];
      double model = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double st = scale[i] * t;
        logTerm[i] = std::log1p(st);
        ratio[i] = st / (1.0 + st);
        model -= shape[i] * logTerm[i];
      }
      const double r = model - target_[k];
      const double wr = weights_[k] * r;
      total += wr * r;
      for (std::size_t i = 0; i < n_; ++i) {
        grad[i] -= 2.0 * wr * shape[i] * logTerm[i];
        grad[n_ + i] -= 2.0 * wr * shape[i] * ratio[i];
      }
    }
    return std::isfinite(total) ? total : kInfinity;
  }

 private:
  std::vector<double> grid_, target_, weights_;
  std::size_t n_;
};

}  // namespace

FitReport fitGammaConvolution(std::span<const double> sample, std::size_t nAtoms,
                              const std::optional<LaplaceGrid>& gridIn, std::uint64_t seed,
                              const GgcFitOptions& options) {
  if (nAtoms == 0) fail(ErrorCode::DomainError, "need at least one atom");
  requireNonEmpty(sample);
  requirePositive(sample);
  if (sample.size() < 10 * nAtoms) {
    fail(ErrorCode::InsufficientData,
         fmt::format("{} observations for {} atoms; need at least {}", sample.size(), nAtoms,
                     10 * nAtoms));
  }
  const LaplaceGrid grid = gridIn ? *gridIn : defaultLaplaceGrid(sample, nAtoms);
  if (grid.size() < 2 * nAtoms) {
    fail(ErrorCode::GridTooSmall,
         fmt::format("{} grid points for {} atoms; need at least {}", grid.size(), nAtoms, 2 * nAtoms));
  }
  if (!options.weights.empty() && options.weights.size() != grid.size()) {
    fail(ErrorCode::DimensionMismatch, "weights and grid differ in length");
  }

  std::vector<double> target(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) target[k] = empiricalLogLaplace(sample, grid.points()[k]);

  // Relative residuals by default: the small-t points carry the tail and would
  // otherwise be drowned out by the large |psi| at the other end of the grid.
  std::vector<double> weights = options.weights;
  if (weights.empty()) {
    weights.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) weights[k] = 1.0 / (target[k] * target[k]);
  }

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double qLo = empiricalQuantileSorted(sorted, 0.01);
  const double qHi = empiricalQuantileSorted(sorted, 0.99);

  // Base start: scales geometric over [q(0.01), q(0.99)], equal shapes sized so
  // the model matches the empirical transform at the middle grid point.
  std::vector<double> baseLogScale(nAtoms);
  for (std::size_t i = 0; i < nAtoms; ++i) {
    const double frac = nAtoms == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(nAtoms - 1);
    baseLogScale[i] = std::log(qLo) + frac * (std::log(qHi) - std::log(qLo));
  }
  const double tMid = grid.points()[grid.size() / 2];
  double unitModel = 0.0;
  for (double ls : baseLogScale) unitModel += std::log1p(std::exp(ls) * tMid);
  const double baseShape = std::max(-target[grid.size() / 2] / unitModel, 1e-6);

  const LogLaplaceObjective objective(grid.points(), target, weights, nAtoms);
  const optimize::Objective fn = [&objective](std::span<const double> x, std::span<double> g) {
    return objective(x, g);
  };
  optimize::BfgsOptions bfgs;
  bfgs.maxEvaluations = options.maxEvaluations;
  bfgs.improvementTolerance = options.improvementTolerance;
  bfgs.recordTrace = true;

  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  std::vector<RestartOutcome> outcomes(restarts);
  auto runRestart = [&](std::size_t r) {
    std::vector<double> x0(2 * nAtoms);
    Rng rng = Rng::derive(seed, r);
    for (std::size_t i = 0; i < nAtoms; ++i) {
      const double jitterShape = r == 0 ? 0.0 : 0.3 * rng.normal();
      const double jitterScale = r == 0 ? 0.0 : 0.5 * rng.normal();
      x0[i] = std::log(baseShape) + jitterShape;
      x0[nAtoms + i] = baseLogScale[i] + jitterScale;
    }
    auto& out = outcomes[r];
    out.run = optimize::minimizeBfgs(fn, std::move(x0), bfgs);
    std::vector<ThorinAtom> atoms(nAtoms);
    for (std::size_t i = 0; i < nAtoms; ++i) {
      atoms[i] = {std::exp(out.run.x[i]), std::exp(out.run.x[nAtoms + i])};
    }
    out.measure = ThorinAtomicMeasure(std::move(atoms));
    out.distinct = countDistinctScales(out.measure);
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, restarts);
  if (threads == 1) {
    for (std::size_t r = 0; r < restarts; ++r) runRestart(r);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < restarts; r += threads) runRestart(r);
      });
    }
  }

  // Lowest objective wins; near-ties go to the fewest distinct scales, then
  // to the earliest restart.
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    const double a = outcomes[r].run.value;
    const double b = outcomes[best].run.value;
    if (a < b - 1e-14 || (std::abs(a - b) <= 1e-14 && outcomes[r].distinct < outcomes[best].distinct)) {
      best = r;
    }
  }

  auto& win = outcomes[best];
  FitReport report;
  report.fitted = GammaConvolutionParams{win.measure};
  report.objectiveValue = win.run.value;
  report.iterations = win.run.iterations;
  report.converged = win.run.converged && std::isfinite(win.run.value);
  report.gridUsed = grid.points();
  report.objectiveTrace = std::move(win.run.trace);
  return report;
}

}  // namespace divisim
