#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divisim/distributions.hpp"
#include "divisim/random.hpp"

namespace divisim {

/// d x n matrix of piece weights beta_{i,j}: entries in [0, 1], rows sum to 1.
class BetaMatrix {
 public:
  BetaMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  static BetaMatrix fromRows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }

  friend bool operator==(const BetaMatrix&, const BetaMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

inline constexpr double kRowSumTolerance = 1e-12;

/// N x d scenario matrix, row-major.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t rows, std::vector<std::string> columnNames);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return names_.size(); }
  const std::vector<std::string>& columnNames() const noexcept { return names_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  std::vector<double> column(std::size_t c) const;
  void setColumn(std::size_t c, std::span<const double> values);
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<double> values_;
};

/// X_i = sum_j Y_{i,j} with Y_{i,j} the beta_{i,j}-piece of marginal i and all
/// pieces of factor j driven by the same uniform U_j.
class RiskFactorModel {
 public:
  const std::vector<Distribution>& marginals() const noexcept { return marginals_; }
  const BetaMatrix& beta() const noexcept { return beta_; }
  const std::vector<std::string>& columnNames() const noexcept { return names_; }
  std::size_t dimension() const noexcept { return marginals_.size(); }
  std::size_t factors() const noexcept { return beta_.cols(); }

  /// The beta_{i,j}-piece of marginal i.
  Distribution piece(std::size_t i, std::size_t j) const;

 private:
  friend RiskFactorModel buildModel(std::vector<Distribution>, BetaMatrix, std::vector<std::string>);
  RiskFactorModel(std::vector<Distribution> m, BetaMatrix b, std::vector<std::string> names)
      : marginals_(std::move(m)), beta_(std::move(b)), names_(std::move(names)) {}

  std::vector<Distribution> marginals_;
  BetaMatrix beta_;
  std::vector<std::string> names_;
};

/// Validates dimensions and divisibility. Empty names become X1..Xd.
RiskFactorModel buildModel(std::vector<Distribution> marginals, BetaMatrix beta,
                           std::vector<std::string> names = {});

/// True marginals whose quantiles replace the approximants' values rank by rank.
struct MarginalReinjection {
  std::vector<std::optional<Distribution>> targets;
};

/// A model file: the model plus optional reinjection targets.
struct ModelSpec {
  RiskFactorModel model;
  MarginalReinjection reinjection;
};

struct SamplingOptions {
  /// Factors are sampled on this many threads; output does not depend on it.
  std::size_t threads = 1;
};

/// Per-piece samples from one run of the sampler.
struct PieceSamples {
  std::size_t scenarios = 0;
  std::size_t dimension = 0;
  std::size_t factors = 0;
  /// Uniforms u_{j, k}, one vector per factor.
  std::vector<std::vector<double>> uniforms;
  /// Entry i * factors + j holds the piece sample of Y_{i,j}; empty when beta_{i,j} = 0.
  std::vector<std::vector<double>> pieces;

  const std::vector<double>& piece(std::size_t i, std::size_t j) const { return pieces[i * factors + j]; }
};

/// Draws every factor's uniforms and transforms them into piece samples.
/// Pieces with a closed quantile use it directly; other pieces draw an
/// auxiliary i.i.d. sample, sort it, and place order statistics by the ranks
/// of the factor's uniforms. Streams derive from one master draw of rng by
/// factor index.
PieceSamples samplePieces(const RiskFactorModel& model, std::size_t n, Rng& rng,
                          const SamplingOptions& options = {});

/// Row k, column i is sum_j Y_{i,j}(u_{j,k}).
SampleMatrix sumPieces(const RiskFactorModel& model, const PieceSamples& pieces);

SampleMatrix sampleModel(const RiskFactorModel& model, std::size_t n, Rng& rng,
                         const SamplingOptions& options = {});

/// Replaces the value of rank k in each targeted column by quantile(target, k / (N + 1)).
SampleMatrix reinjectMarginals(const SampleMatrix& s, const MarginalReinjection& r);

/// Row sums.
std::vector<double> aggregate(const SampleMatrix& s);

/// The two-marginal, three-factor crossed model X = X_0.2 + X_0.8,
/// Y = Y_0.8 + Y_0.2 with X_0.8 and Y_0.2 sharing factor 2.
BetaMatrix crossedBeta();
RiskFactorModel crossedModel(const Distribution& x, const Distribution& y);

}  // namespace divisim
