#include "divisim/divisibility.hpp"

#include <cmath>

#include <fmt/format.h>

#include "divisim/errors.hpp"

namespace divisim {

PieceWeight::PieceWeight(double beta) : beta_(beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    fail(ErrorCode::DomainError, fmt::format("piece weight {} outside [0, 1]", beta));
  }
}

PiecePartition::PiecePartition(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) fail(ErrorCode::DomainError, "partition needs at least one weight");
  double total = 0.0;
  for (double w : weights_) total += PieceWeight(w).value();
  if (std::abs(total - 1.0) > kPartitionTolerance) {
    fail(ErrorCode::DomainError, fmt::format("partition weights sum to {:.17g}, expected 1", total));
  }
}

PiecePartition PiecePartition::equal(std::size_t n) {
  return PiecePartition(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

bool isParametricallyDivisible(const Distribution& d) noexcept {
  switch (d.family()) {
    case Family::Pareto:
    case Family::LogNormal: return false;
    default: return true;
  }
}

Distribution piece(const Distribution& d, PieceWeight weight) {
  const double beta = weight.value();
  // The 0-piece is the constant 0 for every law.
  if (beta == 0.0) return Distribution::zero();
  if (!isParametricallyDivisible(d)) {
    fail(ErrorCode::NotParametricallyDivisible,
         fmt::format("{} has no parametric pieces; fit an approximant first", familyName(d.family())));
  }
  if (beta == 1.0) return d;

  switch (d.family()) {
    case Family::DegenerateZero: return d;
    case Family::Gamma: {
      const auto& p = *d.get_if<GammaParams>();
      return GammaParams{beta * p.shape, p.scale};
    }
    case Family::Gaussian: {
      const auto& p = *d.get_if<GaussianParams>();
      return GaussianParams{beta * p.mean, beta * p.variance};
    }
    case Family::Poisson: return PoissonParams{beta * d.get_if<PoissonParams>()->rate};
    case Family::CompoundPoisson: {
      const auto& p = *d.get_if<CompoundPoissonParams>();
      return CompoundPoissonParams{beta * p.rate, p.severity};
    }
    case Family::NegativeBinomial: {
      const auto& p = *d.get_if<NegativeBinomialParams>();
      return NegativeBinomialParams{beta * p.size, p.prob};
    }
    case Family::GammaConvolution:
      return GammaConvolutionParams{d.get_if<GammaConvolutionParams>()->measure.scaled(beta)};
    case Family::Pareto:
    case Family::LogNormal: break;
  }
  fail(ErrorCode::NotParametricallyDivisible, std::string(familyName(d.family())));
}

std::vector<Distribution> partition(const Distribution& d, const PiecePartition& weights) {
  std::vector<Distribution> pieces;
  pieces.reserve(weights.size());
  for (double w : weights.weights()) pieces.push_back(piece(d, w));
  return pieces;
}

}  // namespace divisim
