#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "divisim/random.hpp"

namespace divisim {

class Distribution;

/// Point mass at 0. This is the 0-piece of every distribution.
struct DegenerateZero {
  friend bool operator==(const DegenerateZero&, const DegenerateZero&) = default;
};

struct GammaParams {
  double shape;
  double scale;
  friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

struct GaussianParams {
  double mean;
  double variance;
  friend bool operator==(const GaussianParams&, const GaussianParams&) = default;
};

struct PoissonParams {
  double rate;
  friend bool operator==(const PoissonParams&, const PoissonParams&) = default;
};

/// Number of failures before `size` successes with success probability
/// `prob`: P(K = k) = Gamma(k + r) / (k! Gamma(r)) p^r (1 - p)^k.
/// Geometric laws are NegativeBinomialParams{1, p}.
struct NegativeBinomialParams {
  double size;
  double prob;
  friend bool operator==(const NegativeBinomialParams&, const NegativeBinomialParams&) = default;
};

/// Density alpha (x + 1)^(-alpha - 1) on x >= 0.
struct ParetoParams {
  double shape;
  friend bool operator==(const ParetoParams&, const ParetoParams&) = default;
};

struct LogNormalParams {
  double logMean;
  double logSd;
  friend bool operator==(const LogNormalParams&, const LogNormalParams&) = default;
};

/// Sum of N ~ Poisson(rate) i.i.d. severity draws. The severity is shared and
/// immutable, so pieces reuse the same object.
struct CompoundPoissonParams {
  double rate;
  std::shared_ptr<const Distribution> severity;
  friend bool operator==(const CompoundPoissonParams& a, const CompoundPoissonParams& b);
};

struct ThorinAtom {
  double shape;
  double scale;
  friend bool operator==(const ThorinAtom&, const ThorinAtom&) = default;
};

/// Finitely atomic Thorin measure sum_i shape_i * delta_{scale_i}.
/// Stored in canonical form: sorted by scale, equal scales merged.
class ThorinAtomicMeasure {
 public:
  ThorinAtomicMeasure() = default;
  explicit ThorinAtomicMeasure(std::vector<ThorinAtom> atoms);

  const std::vector<ThorinAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  double totalMass() const noexcept;

  /// The measure beta * nu.
  ThorinAtomicMeasure scaled(double beta) const;

  friend bool operator==(const ThorinAtomicMeasure&, const ThorinAtomicMeasure&) = default;

 private:
  std::vector<ThorinAtom> atoms_;
};

/// Finite Gamma convolution: independent sum of Gamma(shape_i, scale_i).
struct GammaConvolutionParams {
  ThorinAtomicMeasure measure;
  friend bool operator==(const GammaConvolutionParams&, const GammaConvolutionParams&) = default;
};

enum class Family {
  DegenerateZero,
  Gamma,
  Gaussian,
  Poisson,
  CompoundPoisson,
  NegativeBinomial,
  Pareto,
  LogNormal,
  GammaConvolution,
};

std::string_view familyName(Family f) noexcept;

/// Immutable tagged union over the supported families. Constructors validate
/// the held variant's invariants and throw Error{DomainError} otherwise.
class Distribution {
 public:
  using Variant = std::variant<DegenerateZero, GammaParams, GaussianParams, PoissonParams,
                               CompoundPoissonParams, NegativeBinomialParams, ParetoParams,
                               LogNormalParams, GammaConvolutionParams>;

  Distribution() = default;  // DegenerateZero
  Distribution(DegenerateZero);
  Distribution(GammaParams p);
  Distribution(GaussianParams p);
  Distribution(PoissonParams p);
  Distribution(CompoundPoissonParams p);
  Distribution(NegativeBinomialParams p);
  Distribution(ParetoParams p);
  Distribution(LogNormalParams p);
  /// An empty measure yields DegenerateZero.
  Distribution(GammaConvolutionParams p);

  static Distribution zero() { return {}; }
  static Distribution gamma(double shape, double scale) { return GammaParams{shape, scale}; }
  static Distribution gaussian(double mean, double variance) {
    return GaussianParams{mean, variance};
  }
  static Distribution poisson(double rate) { return PoissonParams{rate}; }
  static Distribution compoundPoisson(double rate, Distribution severity);
  static Distribution negativeBinomial(double size, double prob) {
    return NegativeBinomialParams{size, prob};
  }
  static Distribution geometric(double prob) { return NegativeBinomialParams{1.0, prob}; }
  static Distribution pareto(double shape) { return ParetoParams{shape}; }
  static Distribution logNormal(double logMean, double logSd) {
    return LogNormalParams{logMean, logSd};
  }
  static Distribution gammaConvolution(std::vector<ThorinAtom> atoms);

  Family family() const noexcept { return static_cast<Family>(value_.index()); }
  const Variant& variant() const noexcept { return value_; }

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&value_);
  }

  friend bool operator==(const Distribution& a, const Distribution& b) = default;

 private:
  Variant value_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// psi(t) = ln E[exp(-t X)] for t >= 0. Closed forms where the family has one;
/// Pareto and LogNormal integrate the density numerically.
double logLaplace(const Distribution& d, double t);

/// Laplace transform by adaptive quadrature of the density, mapped onto
/// (0, 1) by x = u / (1 - u). Works for any family with density().
double numericLogLaplace(const Distribution& d, double t);

double density(const Distribution& d, double x);
double cdf(const Distribution& d, double x);

/// inf{x : F(x) >= p}; returns kInfinity at p = 1 for unbounded families.
double quantile(const Distribution& d, double p);

bool hasQuantile(const Distribution& d) noexcept;
bool hasCdf(const Distribution& d) noexcept;
bool hasDensity(const Distribution& d) noexcept;

double draw(const Distribution& d, Rng& rng);
std::vector<double> sample(const Distribution& d, Rng& rng, std::size_t n);

/// Gamma(shape, scale) variate; valid for arbitrarily small shape.
double drawGamma(double shape, double scale, Rng& rng);

/// Mean when it exists, +inf for heavy-tailed families without one.
double mean(const Distribution& d);

}  // namespace divisim
