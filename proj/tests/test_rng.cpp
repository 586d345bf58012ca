#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "spf/rng.hpp"

using namespace spf;

TEST(Rng, CounterAccessMatchesSequentialDraws) {
  CounterRng rng(42);
  for (std::uint64_t k = 0; k < 100; ++k) EXPECT_EQ(rng(), CounterRng::at(42, k));
}

TEST(Rng, ComplexNormalAlignsWithStatelessAccess) {
  CounterRng rng(9);
  rng();  // odd counter: next complex draw skips to an even one
  const Complex z = rng.complex_normal(0.5);
  EXPECT_EQ(z, CounterRng::complex_normal_at(9, 1, 0.5));
  EXPECT_EQ(rng.counter(), 4u);
}

TEST(Rng, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
}

TEST(Rng, UniformInUnitInterval) {
  CounterRng rng(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

// CN(0, v): real and imaginary parts each have variance v/2 and are uncorrelated.
TEST(Rng, ComplexNormalMoments) {
  CounterRng rng(11);
  const int n = 200000;
  const double v = 0.25;
  double re2 = 0.0, im2 = 0.0, reim = 0.0, re = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex z = rng.complex_normal(v);
    re += z.real();
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    reim += z.real() * z.imag();
  }
  EXPECT_NEAR(re / n, 0.0, 0.005);
  EXPECT_NEAR(re2 / n, v / 2, 0.02 * v);
  EXPECT_NEAR(im2 / n, v / 2, 0.02 * v);
  EXPECT_NEAR(reim / n, 0.0, 0.01 * v);
}

TEST(Rng, BelowIsUnbiased) {
  CounterRng rng(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(7)];
  // 5 sigma of a binomial(n, 1/7) count.
  const double sigma = std::sqrt(n * (1.0 / 7) * (6.0 / 7));
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * sigma);
}

TEST(Rng, RandomSubsetIsSortedAndUniform) {
  const std::size_t n = 10, k = 3, draws = 20000;
  std::vector<int> hits(n, 0);
  for (std::uint64_t d = 0; d < draws; ++d) {
    CounterRng rng(derive_seed(1, d));
    const IndexSet J = random_subset(rng, n, k);
    ASSERT_EQ(J.size(), k);
    for (std::size_t j : J) ++hits[j];
  }
  const double p = static_cast<double>(k) / n;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int h : hits) EXPECT_NEAR(h, draws * p, 4 * sigma);
  CounterRng rng(0);
  EXPECT_THROW(random_subset(rng, 3, 4), InvalidArgument);
  EXPECT_EQ(random_subset(rng, 4, 4), IndexSet::full(4));
}
