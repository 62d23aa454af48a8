#include "divisim/riskfactor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "divisim/diagnostics.hpp"
#include "divisim/divisibility.hpp"
#include "divisim/errors.hpp"

namespace divisim {

BetaMatrix::BetaMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) fail(ErrorCode::DimensionMismatch, "beta matrix must be at least 1x1");
  if (entries_.size() != rows_ * cols_) {
    fail(ErrorCode::DimensionMismatch,
         fmt::format("beta has {} entries, expected {}x{}", entries_.size(), rows_, cols_));
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      const double b = (*this)(i, j);
      if (!(b >= 0.0 && b <= 1.0)) {
        fail(ErrorCode::DomainError,
             fmt::format("beta entry ({}, {}) = {} outside [0, 1]", i + 1, j + 1, b));
      }
      sum += b;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      fail(ErrorCode::RowSumViolation, fmt::format(" row {} (sum={:g})", i + 1, sum));
    }
  }
}

BetaMatrix BetaMatrix::fromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) fail(ErrorCode::DimensionMismatch, "beta matrix has no rows");
  const std::size_t cols = rows.front().size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      fail(ErrorCode::DimensionMismatch,
           fmt::format("beta row {} has {} entries, row 1 has {}", i + 1, rows[i].size(), cols));
    }
    entries.insert(entries.end(), rows[i].begin(), rows[i].end());
  }
  return BetaMatrix(rows.size(), cols, std::move(entries));
}

SampleMatrix::SampleMatrix(std::size_t rows, std::vector<std::string> columnNames)
    : rows_(rows), names_(std::move(columnNames)), values_(rows * names_.size(), 0.0) {}

std::vector<double> SampleMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void SampleMatrix::setColumn(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_) fail(ErrorCode::DimensionMismatch, "column length differs from row count");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Distribution RiskFactorModel::piece(std::size_t i, std::size_t j) const {
  return divisim::piece(marginals_.at(i), beta_(i, j));
}

RiskFactorModel buildModel(std::vector<Distribution> marginals, BetaMatrix beta,
                           std::vector<std::string> names) {
  if (marginals.empty()) fail(ErrorCode::DimensionMismatch, "model needs at least one marginal");
  if (marginals.size() != beta.rows()) {
    fail(ErrorCode::DimensionMismatch,
         fmt::format("{} marginals but beta has {} rows", marginals.size(), beta.rows()));
  }
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    if (!isParametricallyDivisible(marginals[i])) {
      fail(ErrorCode::NotParametricallyDivisible,
           fmt::format("marginal {} ({}) must be replaced by a divisible approximant", i + 1,
                       familyName(marginals[i].family())));
    }
  }
  if (names.empty()) {
    for (std::size_t i = 0; i < marginals.size(); ++i) names.push_back(fmt::format("X{}", i + 1));
  }
  if (names.size() != marginals.size()) {
    fail(ErrorCode::DimensionMismatch,
         fmt::format("{} column names for {} marginals", names.size(), marginals.size()));
  }
  return RiskFactorModel(std::move(marginals), std::move(beta), std::move(names));
}

namespace {

void sampleFactor(const RiskFactorModel& model, std::size_t j, std::size_t n, std::uint64_t master,
                  PieceSamples& out) {
  auto& u = out.uniforms[j];
  u.resize(n);
  Rng uniformStream = Rng::derive(master, j, 0);
  for (auto& v : u) v = uniformStream.uniform();

  // order[r] = scenario index holding the (r+1)-th smallest uniform.
  std::vector<std::size_t> order;
  bool orderReady = false;

  for (std::size_t i = 0; i < model.dimension(); ++i) {
    if (model.beta()(i, j) == 0.0) continue;
    const Distribution p = model.piece(i, j);
    auto& values = out.pieces[i * out.factors + j];
    values.resize(n);
    if (hasQuantile(p)) {
      for (std::size_t k = 0; k < n; ++k) values[k] = quantile(p, u[k]);
      continue;
    }
    if (!orderReady) {
      order.resize(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&u](std::size_t a, std::size_t b) { return u[a] < u[b]; });
      orderReady = true;
    }
    Rng auxStream = Rng::derive(master, j, i + 1);
    std::vector<double> aux = sample(p, auxStream, n);
    std::sort(aux.begin(), aux.end());
    for (std::size_t r = 0; r < n; ++r) values[order[r]] = aux[r];
  }
}

}  // namespace

PieceSamples samplePieces(const RiskFactorModel& model, std::size_t n, Rng& rng,
                          const SamplingOptions& options) {
  PieceSamples out;
  out.scenarios = n;
  out.dimension = model.dimension();
  out.factors = model.factors();
  out.uniforms.resize(out.factors);
  out.pieces.resize(out.dimension * out.factors);

  const std::uint64_t master = rng.next();
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, out.factors);
  if (threads == 1) {
    for (std::size_t j = 0; j < out.factors; ++j) sampleFactor(model, j, n, master, out);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < out.factors; j += threads) sampleFactor(model, j, n, master, out);
      });
    }
  }
  return out;
}

SampleMatrix sumPieces(const RiskFactorModel& model, const PieceSamples& pieces) {
  SampleMatrix s(pieces.scenarios, model.columnNames());
  for (std::size_t i = 0; i < pieces.dimension; ++i) {
    for (std::size_t j = 0; j < pieces.factors; ++j) {
      const auto& values = pieces.piece(i, j);
      if (values.empty()) continue;
      for (std::size_t k = 0; k < pieces.scenarios; ++k) s(k, i) += values[k];
    }
  }
  return s;
}

SampleMatrix sampleModel(const RiskFactorModel& model, std::size_t n, Rng& rng,
                         const SamplingOptions& options) {
  return sumPieces(model, samplePieces(model, n, rng, options));
}

SampleMatrix reinjectMarginals(const SampleMatrix& s, const MarginalReinjection& r) {
  if (r.targets.empty()) return s;
  if (r.targets.size() != s.cols()) {
    fail(ErrorCode::DimensionMismatch,
         fmt::format("{} reinjection targets for {} columns", r.targets.size(), s.cols()));
  }
  SampleMatrix out = s;
  const double denom = static_cast<double>(s.rows()) + 1.0;
  for (std::size_t c = 0; c < s.cols(); ++c) {
    if (!r.targets[c]) continue;
    const Distribution& target = *r.targets[c];
    if (!hasQuantile(target)) {
      fail(ErrorCode::UnsupportedQuantile,
           fmt::format("reinjection target for column {} ({}) has no quantile", c + 1,
                       familyName(target.family())));
    }
    const auto ranks = stableRanks(s.column(c));
    for (std::size_t k = 0; k < s.rows(); ++k) {
      out(k, c) = quantile(target, static_cast<double>(ranks[k]) / denom);
    }
  }
  return out;
}

std::vector<double> aggregate(const SampleMatrix& s) {
  std::vector<double> total(s.rows(), 0.0);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.cols(); ++c) total[r] += s(r, c);
  }
  return total;
}

BetaMatrix crossedBeta() { return BetaMatrix::fromRows({{0.2, 0.8, 0.0}, {0.0, 0.2, 0.8}}); }

RiskFactorModel crossedModel(const Distribution& x, const Distribution& y) {
  return buildModel({x, y}, crossedBeta(), {"X", "Y"});
}

}  // namespace divisim
