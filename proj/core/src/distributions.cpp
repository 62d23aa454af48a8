#include "divisim/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "divisim/errors.hpp"

namespace divisim {

namespace {

namespace bm = boost::math;
using Policy = bm::policies::policy<bm::policies::overflow_error<bm::policies::ignore_error>>;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positiveFinite(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, std::string_view what) {
  if (!ok) fail(ErrorCode::DomainError, std::string(what));
}

double standardNormalQuantile(double p) {
  return -std::numbers::sqrt2 * bm::erfc_inv(2.0 * p, Policy{});
}

double standardNormalCdf(double z) { return 0.5 * bm::erfc(-z / std::numbers::sqrt2, Policy{}); }

void checkProbability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::DomainError, fmt::format("probability {} outside [0, 1]", p));
}

}  // namespace

bool operator==(const CompoundPoissonParams& a, const CompoundPoissonParams& b) {
  if (a.rate != b.rate) return false;
  if (a.severity == b.severity) return true;
  if (!a.severity || !b.severity) return false;
  return *a.severity == *b.severity;
}

ThorinAtomicMeasure::ThorinAtomicMeasure(std::vector<ThorinAtom> atoms) {
  for (const auto& a : atoms) {
    require(positiveFinite(a.shape) && positiveFinite(a.scale),
            fmt::format("Thorin atom ({}, {}) must have positive shape and scale", a.shape, a.scale));
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const ThorinAtom& l, const ThorinAtom& r) { return l.scale < r.scale; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().scale == a.scale) {
      atoms_.back().shape += a.shape;
    } else {
      atoms_.push_back(a);
    }
  }
}

double ThorinAtomicMeasure::totalMass() const noexcept {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.shape;
  return m;
}

ThorinAtomicMeasure ThorinAtomicMeasure::scaled(double beta) const {
  ThorinAtomicMeasure out;
  if (beta == 0.0) return out;
  out.atoms_ = atoms_;
  for (auto& a : out.atoms_) a.shape *= beta;
  return out;
}

std::string_view familyName(Family f) noexcept {
  switch (f) {
    case Family::DegenerateZero: return "zero";
    case Family::Gamma: return "gamma";
    case Family::Gaussian: return "gaussian";
    case Family::Poisson: return "poisson";
    case Family::CompoundPoisson: return "compound_poisson";
    case Family::NegativeBinomial: return "negative_binomial";
    case Family::Pareto: return "pareto";
    case Family::LogNormal: return "lognormal";
    case Family::GammaConvolution: return "ggc";
  }
  return "unknown";
}

Distribution::Distribution(DegenerateZero) {}

Distribution::Distribution(GammaParams p) : value_(p) {
  require(positiveFinite(p.shape) && positiveFinite(p.scale),
          fmt::format("gamma requires shape > 0 and scale > 0, got ({}, {})", p.shape, p.scale));
}

Distribution::Distribution(GaussianParams p) : value_(p) {
  require(std::isfinite(p.mean) && positiveFinite(p.variance),
          fmt::format("gaussian requires finite mean and variance > 0, got ({}, {})", p.mean,
                      p.variance));
}

Distribution::Distribution(PoissonParams p) : value_(p) {
  require(positiveFinite(p.rate), fmt::format("poisson requires rate > 0, got {}", p.rate));
}

Distribution::Distribution(CompoundPoissonParams p) : value_(p) {
  require(positiveFinite(p.rate), fmt::format("compound poisson requires rate > 0, got {}", p.rate));
  require(p.severity != nullptr, "compound poisson requires a severity distribution");
}

Distribution::Distribution(NegativeBinomialParams p) : value_(p) {
  require(positiveFinite(p.size) && p.prob > 0.0 && p.prob < 1.0,
          fmt::format("negative binomial requires size > 0 and 0 < prob < 1, got ({}, {})", p.size,
                      p.prob));
}

Distribution::Distribution(ParetoParams p) : value_(p) {
  require(positiveFinite(p.shape), fmt::format("pareto requires shape > 0, got {}", p.shape));
}

Distribution::Distribution(LogNormalParams p) : value_(p) {
  require(std::isfinite(p.logMean) && positiveFinite(p.logSd),
          fmt::format("lognormal requires finite logMean and logSd > 0, got ({}, {})", p.logMean,
                      p.logSd));
}

Distribution::Distribution(GammaConvolutionParams p) {
  if (!p.measure.empty()) value_ = std::move(p);
}

Distribution Distribution::compoundPoisson(double rate, Distribution severity) {
  return CompoundPoissonParams{rate, std::make_shared<const Distribution>(std::move(severity))};
}

Distribution Distribution::gammaConvolution(std::vector<ThorinAtom> atoms) {
  return GammaConvolutionParams{ThorinAtomicMeasure(std::move(atoms))};
}

// ---------------------------------------------------------------------------
// Transforms

double numericLogLaplace(const Distribution& d, double t) {
  if (!(t >= 0.0)) fail(ErrorCode::DomainError, fmt::format("transform argument t = {} < 0", t));
  if (!hasDensity(d) || d.family() == Family::Gaussian) {
    fail(ErrorCode::UnsupportedTransform,
         fmt::format("no integrable density on the positive half-line for {}", familyName(d.family())));
  }
  if (t == 0.0) return 0.0;
  auto integrand = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double w = 1.0 - u;
    const double x = u / w;
    const double fx = density(d, x);
    if (fx == 0.0) return 0.0;
    return std::exp(-t * x) * fx / (w * w);
  };
  thread_local bm::quadrature::tanh_sinh<double> integrator(15);
  const double value = integrator.integrate(integrand, 0.0, 1.0, 1e-10);
  return std::log(value);
}

double logLaplace(const Distribution& d, double t) {
  if (!(t >= 0.0)) fail(ErrorCode::DomainError, fmt::format("transform argument t = {} < 0", t));
  if (t == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [](const DegenerateZero&) { return 0.0; },
          [t](const GammaParams& p) { return -p.shape * std::log1p(p.scale * t); },
          [t](const GaussianParams& p) { return -p.mean * t + 0.5 * p.variance * t * t; },
          [t](const PoissonParams& p) { return p.rate * std::expm1(-t); },
          [t](const CompoundPoissonParams& p) {
            return p.rate * std::expm1(logLaplace(*p.severity, t));
          },
          [t](const NegativeBinomialParams& p) {
            return p.size * (std::log(p.prob) - std::log1p(-(1.0 - p.prob) * std::exp(-t)));
          },
          [&d, t](const ParetoParams&) { return numericLogLaplace(d, t); },
          [&d, t](const LogNormalParams&) { return numericLogLaplace(d, t); },
          [t](const GammaConvolutionParams& p) {
            double acc = 0.0;
            for (const auto& a : p.measure.atoms()) acc -= a.shape * std::log1p(a.scale * t);
            return acc;
          },
      },
      d.variant());
}

// ---------------------------------------------------------------------------
// Density, CDF, quantile

bool hasDensity(const Distribution& d) noexcept {
  switch (d.family()) {
    case Family::Gamma:
    case Family::Gaussian:
    case Family::Pareto:
    case Family::LogNormal: return true;
    default: return false;
  }
}

bool hasCdf(const Distribution& d) noexcept {
  switch (d.family()) {
    case Family::CompoundPoisson:
    case Family::GammaConvolution: return false;
    default: return true;
  }
}

bool hasQuantile(const Distribution& d) noexcept {
  switch (d.family()) {
    case Family::DegenerateZero:
    case Family::Gamma:
    case Family::Gaussian:
    case Family::Pareto:
    case Family::LogNormal: return true;
    default: return false;
  }
}

double density(const Distribution& d, double x) {
  return std::visit(
      Overloaded{
          [x](const GammaParams& p) {
            if (x < 0.0) return 0.0;
            if (x == 0.0) {
              if (p.shape < 1.0) return kInfinity;
              return p.shape == 1.0 ? 1.0 / p.scale : 0.0;
            }
            return bm::gamma_p_derivative(p.shape, x / p.scale, Policy{}) / p.scale;
          },
          [x](const GaussianParams& p) {
            const double z = (x - p.mean) / std::sqrt(p.variance);
            return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * p.variance);
          },
          [x](const ParetoParams& p) {
            if (x < 0.0) return 0.0;
            return p.shape * std::exp((-p.shape - 1.0) * std::log1p(x));
          },
          [x](const LogNormalParams& p) {
            if (x <= 0.0) return 0.0;
            const double z = (std::log(x) - p.logMean) / p.logSd;
            return std::exp(-0.5 * z * z) / (x * p.logSd * std::sqrt(2.0 * std::numbers::pi));
          },
          [&d](const auto&) -> double {
            fail(ErrorCode::UnsupportedDensity,
                 fmt::format("no density for family {}", familyName(d.family())));
          },
      },
      d.variant());
}

double cdf(const Distribution& d, double x) {
  return std::visit(
      Overloaded{
          [x](const DegenerateZero&) { return x < 0.0 ? 0.0 : 1.0; },
          [x](const GammaParams& p) {
            if (x <= 0.0) return 0.0;
            if (std::isinf(x)) return 1.0;
            return bm::gamma_p(p.shape, x / p.scale, Policy{});
          },
          [x](const GaussianParams& p) { return standardNormalCdf((x - p.mean) / std::sqrt(p.variance)); },
          [x](const PoissonParams& p) {
            if (x < 0.0) return 0.0;
            if (std::isinf(x)) return 1.0;
            return bm::gamma_q(std::floor(x) + 1.0, p.rate, Policy{});
          },
          [x](const NegativeBinomialParams& p) {
            if (x < 0.0) return 0.0;
            if (std::isinf(x)) return 1.0;
            return bm::ibeta(p.size, std::floor(x) + 1.0, p.prob, Policy{});
          },
          [x](const ParetoParams& p) {
            if (x <= 0.0) return 0.0;
            return -std::expm1(-p.shape * std::log1p(x));
          },
          [x](const LogNormalParams& p) {
            if (x <= 0.0) return 0.0;
            return standardNormalCdf((std::log(x) - p.logMean) / p.logSd);
          },
          [&d](const auto&) -> double {
            fail(ErrorCode::UnsupportedCdf, fmt::format("no cdf for family {}", familyName(d.family())));
          },
      },
      d.variant());
}

double quantile(const Distribution& d, double p) {
  checkProbability(p);
  return std::visit(
      Overloaded{
          [](const DegenerateZero&) { return 0.0; },
          [p](const GammaParams& g) {
            if (p == 0.0) return 0.0;
            if (p == 1.0) return kInfinity;
            return g.scale * bm::gamma_p_inv(g.shape, p, Policy{});
          },
          [p](const GaussianParams& g) {
            if (p == 0.0) return -kInfinity;
            if (p == 1.0) return kInfinity;
            return g.mean + std::sqrt(g.variance) * standardNormalQuantile(p);
          },
          [p](const ParetoParams& g) {
            if (p == 1.0) return kInfinity;
            return std::expm1(-std::log1p(-p) / g.shape);
          },
          [p](const LogNormalParams& g) {
            if (p == 0.0) return 0.0;
            if (p == 1.0) return kInfinity;
            return std::exp(g.logMean + g.logSd * standardNormalQuantile(p));
          },
          [&d](const auto&) -> double {
            fail(ErrorCode::UnsupportedQuantile,
                 fmt::format("no closed quantile for family {}", familyName(d.family())));
          },
      },
      d.variant());
}

// ---------------------------------------------------------------------------
// Sampling

double drawGamma(double shape, double scale, Rng& rng) {
  // Marsaglia-Tsang. Shapes below 1 are boosted to shape + 1 and corrected by
  // U^(1/shape), done in logs so tiny shapes underflow cleanly to 0.
  const bool boosted = shape < 1.0;
  const double a = boosted ? shape + 1.0 : shape;
  const double dd = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * dd);
  double value = 0.0;
  for (;;) {
    const double z = rng.normal();
    double v = 1.0 + c * z;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * z * z + dd - dd * v + dd * std::log(v)) {
      value = dd * v;
      break;
    }
  }
  if (boosted) value = std::exp(std::log(value) + std::log(rng.uniform()) / shape);
  return value * scale;
}

namespace {

double drawPoisson(double rate, Rng& rng) {
  if (rate <= 0.0) return 0.0;
  std::poisson_distribution<long long> dist(rate);
  return static_cast<double>(dist(rng.engine()));
}

}  // namespace

double draw(const Distribution& d, Rng& rng) {
  return std::visit(
      Overloaded{
          [](const DegenerateZero&) { return 0.0; },
          [&rng](const GammaParams& p) { return drawGamma(p.shape, p.scale, rng); },
          [&rng](const GaussianParams& p) { return p.mean + std::sqrt(p.variance) * rng.normal(); },
          [&rng](const PoissonParams& p) { return drawPoisson(p.rate, rng); },
          [&rng](const CompoundPoissonParams& p) {
            const auto count = static_cast<long long>(drawPoisson(p.rate, rng));
            double total = 0.0;
            for (long long k = 0; k < count; ++k) total += draw(*p.severity, rng);
            return total;
          },
          [&rng](const NegativeBinomialParams& p) {
            // Poisson mixed over a Gamma rate.
            const double lambda = drawGamma(p.size, (1.0 - p.prob) / p.prob, rng);
            return drawPoisson(lambda, rng);
          },
          [&rng](const ParetoParams& p) { return std::expm1(-std::log(rng.uniform()) / p.shape); },
          [&rng](const LogNormalParams& p) { return std::exp(p.logMean + p.logSd * rng.normal()); },
          [&rng](const GammaConvolutionParams& p) {
            double total = 0.0;
            for (const auto& a : p.measure.atoms()) total += drawGamma(a.shape, a.scale, rng);
            return total;
          },
      },
      d.variant());
}

std::vector<double> sample(const Distribution& d, Rng& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = draw(d, rng);
  return out;
}

double mean(const Distribution& d) {
  return std::visit(
      Overloaded{
          [](const DegenerateZero&) { return 0.0; },
          [](const GammaParams& p) { return p.shape * p.scale; },
          [](const GaussianParams& p) { return p.mean; },
          [](const PoissonParams& p) { return p.rate; },
          [](const CompoundPoissonParams& p) { return p.rate * mean(*p.severity); },
          [](const NegativeBinomialParams& p) { return p.size * (1.0 - p.prob) / p.prob; },
          [](const ParetoParams& p) { return p.shape > 1.0 ? 1.0 / (p.shape - 1.0) : kInfinity; },
          [](const LogNormalParams& p) { return std::exp(p.logMean + 0.5 * p.logSd * p.logSd); },
          [](const GammaConvolutionParams& p) {
            double m = 0.0;
            for (const auto& a : p.measure.atoms()) m += a.shape * a.scale;
            return m;
          },
      },
      d.variant());
}

}  // namespace divisim
