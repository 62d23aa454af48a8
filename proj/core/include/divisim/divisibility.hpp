#pragma once

#include <span>
#include <vector>

#include "divisim/distributions.hpp"

namespace divisim {

/// A piece weight beta in [0, 1].
class PieceWeight {
 public:
  /*implicit*/ PieceWeight(double beta);
  double value() const noexcept { return beta_; }

 private:
  double beta_;
};

/// Weights in [0, 1] summing to 1 within 1e-12.
class PiecePartition {
 public:
  explicit PiecePartition(std::vector<double> weights);
  static PiecePartition equal(std::size_t n);

  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }

 private:
  std::vector<double> weights_;
};

inline constexpr double kPartitionTolerance = 1e-12;

/// True for families whose pieces stay in a known parametric family.
bool isParametricallyDivisible(const Distribution& d) noexcept;

/// The beta-piece: the law whose log-Laplace transform is beta * psi_d.
/// beta = 0 gives DegenerateZero and beta = 1 returns d unchanged. Pareto and
/// LogNormal throw NotParametricallyDivisible.
Distribution piece(const Distribution& d, PieceWeight beta);

/// One piece per weight. The pieces' transforms sum to psi_d.
std::vector<Distribution> partition(const Distribution& d, const PiecePartition& weights);

}  // namespace divisim
