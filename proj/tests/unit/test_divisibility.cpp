#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "divisim/diagnostics.hpp"
#include "divisim/divisibility.hpp"
#include "divisim/errors.hpp"
#include "support.hpp"

using namespace divisim;

namespace {

std::vector<Distribution> divisible() {
  return {Distribution::gamma(2.0, 3.0),
          Distribution::gaussian(2.0, 4.0),
          Distribution::poisson(10.0),
          Distribution::compoundPoisson(3.0, Distribution::gamma(1.0, 1.0)),
          Distribution::negativeBinomial(2.0, 0.4),
          Distribution::geometric(0.25),
          Distribution::gammaConvolution({{1.0, 1.0}, {2.0, 5.0}}),
          Distribution::zero()};
}

ErrorCode codeOf(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::ParseError;
}

double poissonPmf(double lambda, int k) { return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0)); }

}  // namespace

TEST(Piece, Examples) {
  EXPECT_EQ(piece(Distribution::gamma(2, 3), 0.5), Distribution::gamma(1, 3));
  EXPECT_EQ(piece(Distribution::gaussian(2, 4), 0.25), Distribution::gaussian(0.5, 1));
  EXPECT_NEAR(piece(Distribution::poisson(10), 0.3).get_if<PoissonParams>()->rate, 3.0, 1e-15);
  EXPECT_EQ(piece(Distribution::gammaConvolution({{1, 1}, {2, 5}}), 0.5),
            Distribution::gammaConvolution({{0.5, 1}, {1, 5}}));
  for (const auto& d : divisible()) EXPECT_EQ(piece(d, 0.0), Distribution::zero());
}

TEST(Piece, FamilyRules) {
  const auto nb = piece(Distribution::negativeBinomial(2.0, 0.4), 0.25);
  EXPECT_EQ(nb, Distribution::negativeBinomial(0.5, 0.4));
  const auto sev = Distribution::gamma(1.0, 1.0);
  const auto cp = Distribution::compoundPoisson(3.0, sev);
  const auto half = piece(cp, 0.5);
  const auto* p = half.get_if<CompoundPoissonParams>();
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->rate, 1.5);
  // The severity object itself is shared, not copied.
  EXPECT_EQ(p->severity.get(), cp.get_if<CompoundPoissonParams>()->severity.get());
}

TEST(Piece, IdentityAndZero) {
  for (const auto& d : divisible()) {
    EXPECT_EQ(piece(d, 1.0), d);
    EXPECT_EQ(piece(d, 0.0).family(), Family::DegenerateZero);
  }
  EXPECT_EQ(piece(Distribution::pareto(0.75), 0.0), Distribution::zero());
}

TEST(Piece, TransformLaw) {
  for (const auto& d : divisible())
    for (double b : {0.0, 0.1, 0.5, 0.9, 1.0})
      for (double t : {0.1, 1.0, 10.0})
        EXPECT_NEAR(logLaplace(piece(d, b), t), b * logLaplace(d, t), 1e-12)
            << familyName(d.family()) << " b=" << b << " t=" << t;
}

TEST(Piece, CompositionDyadicIsExact) {
  for (const auto& d : divisible())
    for (double b1 : {0.5, 0.25, 0.75})
      for (double b2 : {0.5, 0.125})
        EXPECT_EQ(piece(piece(d, b1), b2), piece(d, b1 * b2)) << familyName(d.family());
}

TEST(Piece, CompositionGeneralWithinTwoUlp) {
  const auto d = Distribution::gamma(2.7, 1.3);
  for (double b1 : {0.1, 0.3, 0.7})
    for (double b2 : {0.2, 0.9}) {
      const double a = piece(piece(d, b1), b2).get_if<GammaParams>()->shape;
      const double c = piece(d, b1 * b2).get_if<GammaParams>()->shape;
      EXPECT_LE(std::fabs(a - c), 2 * std::fabs(std::nextafter(c, 1e300) - c));
    }
}

TEST(Piece, Errors) {
  EXPECT_EQ(codeOf([] { piece(Distribution::pareto(0.75), 0.5); }), ErrorCode::NotParametricallyDivisible);
  EXPECT_EQ(codeOf([] { piece(Distribution::logNormal(0, 2), 0.5); }), ErrorCode::NotParametricallyDivisible);
  EXPECT_EQ(codeOf([] { piece(Distribution::gamma(1, 1), 1.5); }), ErrorCode::DomainError);
  EXPECT_EQ(codeOf([] { piece(Distribution::gamma(1, 1), -0.1); }), ErrorCode::DomainError);
  try {
    piece(Distribution::pareto(0.75), 0.5);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("fit an approximant first"), std::string::npos);
  }
}

TEST(Piece, SingleAtomConvolutionMatchesGamma) {
  const auto g = Distribution::gamma(1.7, 2.2);
  const auto c = Distribution::gammaConvolution({{1.7, 2.2}});
  for (double b : {0.1, 0.5, 0.9})
    for (double t : {0.1, 1.0, 10.0}) EXPECT_EQ(logLaplace(piece(c, b), t), logLaplace(piece(g, b), t));
}

TEST(Partition, Examples) {
  const auto thirds = partition(Distribution::gamma(3, 1), PiecePartition({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  ASSERT_EQ(thirds.size(), 3u);
  for (const auto& p : thirds) {
    EXPECT_NEAR(p.get_if<GammaParams>()->shape, 1.0, 1e-15);
    EXPECT_EQ(p.get_if<GammaParams>()->scale, 1.0);
  }
  const auto split = partition(Distribution::gamma(1, 2), PiecePartition({0.2, 0.8}));
  EXPECT_EQ(split[0], Distribution::gamma(0.2, 2));
  EXPECT_EQ(split[1], Distribution::gamma(0.8, 2));
  EXPECT_EQ(partition(Distribution::poisson(5), PiecePartition({1.0})),
            std::vector<Distribution>{Distribution::poisson(5)});
}

TEST(Partition, TransformsSumBack) {
  const PiecePartition w({0.1, 0.2, 0.3, 0.4});
  for (const auto& d : divisible()) {
    const auto parts = partition(d, w);
    for (double t : {0.0, 0.1, 1.0, 10.0}) {
      double s = 0.0;
      for (const auto& p : parts) s += logLaplace(p, t);
      EXPECT_NEAR(s, logLaplace(d, t), 1e-12) << familyName(d.family());
    }
  }
}

TEST(Partition, Validation) {
  EXPECT_EQ(codeOf([] { PiecePartition({0.5, 0.4}); }), ErrorCode::DomainError);
  EXPECT_EQ(codeOf([] { PiecePartition({1.2, -0.2}); }), ErrorCode::DomainError);
  EXPECT_EQ(codeOf([] { PiecePartition(std::vector<double>{}); }), ErrorCode::DomainError);
  EXPECT_NO_THROW(PiecePartition({0.1, 0.2, 0.7}));
  EXPECT_EQ(PiecePartition::equal(4).weights(), std::vector<double>(4, 0.25));
}

TEST(Divisible, Classification) {
  for (const auto& d : divisible()) EXPECT_TRUE(isParametricallyDivisible(d)) << familyName(d.family());
  EXPECT_FALSE(isParametricallyDivisible(Distribution::logNormal(0, 2)));
  EXPECT_FALSE(isParametricallyDivisible(Distribution::pareto(0.75)));
  EXPECT_TRUE(isParametricallyDivisible(Distribution::gammaConvolution({{1, 1}})));
}

TEST(Oracle, PoissonHalvesConvolveBack) {
  const auto halves = partition(Distribution::poisson(2.0), PiecePartition::equal(2));
  const double l1 = halves[0].get_if<PoissonParams>()->rate;
  const double l2 = halves[1].get_if<PoissonParams>()->rate;
  for (int m = 0; m <= 40; ++m) {
    double conv = 0.0;
    for (int k = 0; k <= m; ++k) conv += poissonPmf(l1, k) * poissonPmf(l2, m - k);
    EXPECT_NEAR(conv, poissonPmf(2.0, m), 1e-10) << m;
  }
}

TEST(Reconstruction, QuarterPiecesSumToWhole) {
  const std::size_t n = 100'000;
  for (const auto& d : {Distribution::gamma(2, 1), Distribution::poisson(4),
                        Distribution::compoundPoisson(3, Distribution::gamma(1, 1))}) {
    int failures = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      std::vector<double> summed(n, 0.0);
      for (const auto& p : partition(d, PiecePartition::equal(4))) {
        const auto x = sample(p, rng, n);
        for (std::size_t k = 0; k < n; ++k) summed[k] += x[k];
      }
      const auto direct = sample(d, rng, n);
      if (ksStatistic(summed, direct) >= divisim::test::ksCritical2(n, n)) ++failures;
    }
    EXPECT_LE(failures, 1) << familyName(d.family());
  }
}
