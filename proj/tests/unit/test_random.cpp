#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "divisim/random.hpp"

using divisim::Rng;

TEST(Rng, Deterministic) {
  Rng a(5), b(5), c(6);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
}

TEST(Rng, DerivedStreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 50; ++s) {
    firsts.insert(Rng::derive(7, s).next());
    firsts.insert(Rng::derive(7, s, 1).next());
  }
  EXPECT_EQ(firsts.size(), 100u);
  EXPECT_EQ(Rng::derive(7, 3).next(), Rng::derive(7, 3).next());
  EXPECT_NE(Rng::derive(7, 3, 0).next(), Rng::derive(7, 3).next());
}

TEST(Rng, UniformOpenInterval) {
  Rng r(1);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 3 * std::sqrt(1.0 / 12 / n));
}

TEST(Rng, NormalMoments) {
  Rng r(2);
  const int n = 1'000'000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 3.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(Rng, MixSeedSpreads) {
  EXPECT_NE(divisim::mixSeed(0), 0u);
  EXPECT_NE(divisim::mixSeed(1), divisim::mixSeed(2));
}
