#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spf/theory.hpp"
#include "test_util.hpp"

using namespace spf;
using namespace spf::theory;

TEST(HtpConstants, QuotedTripleAtDelta008) {
  const TheoryConstants c = htp_constants(0.08);
  EXPECT_EQ(c.L, 3);
  EXPECT_NEAR(c.C_htp, 2.86, 0.01);
  // Closed form evaluates to 2.085; the quoted 3.17 is not reproduced.
  EXPECT_NEAR(c.K, 3.17, 0.01);
}

TEST(HtpConstants, ClosedForms) {
  const double d = 0.2;
  const TheoryConstants c = htp_constants(d);
  EXPECT_NEAR(c.rho, std::sqrt(2 * d * d / (1 - d * d)), 1e-15);
  EXPECT_NEAR(c.tau, std::sqrt(2 / (1 - d * d)) + 1 / (1 - d), 1e-15);
  EXPECT_NEAR(c.rho_prime, 1 / std::sqrt(1 - d * d), 1e-15);
  EXPECT_NEAR(c.tau_prime, 1 / (1 - d), 1e-15);
  EXPECT_NEAR(c.C_htp, 1.01 * c.tau / (1 - c.rho), 1e-14);
}

TEST(HtpConstants, SmallDeltaLimit) {
  const TheoryConstants c = htp_constants(1e-9);
  EXPECT_LT(c.rho, 1e-8);
  EXPECT_NEAR(c.C_htp, 1.01 * (std::sqrt(2.0) + 1.0), 1e-6);
}

TEST(HtpConstants, LowerBoundOnC) {
  for (double d = 0.005; d < 1 / std::sqrt(3.0); d += 0.005) {
    const TheoryConstants c = htp_constants(d);
    EXPECT_GE(c.C_htp, 1 / (1 - d));
    EXPECT_GT(c.K, 0.0);
    EXPECT_LT(c.rho, 1.0);
  }
}

TEST(HtpConstants, OutOfRangeThrows) {
  EXPECT_THROW(htp_constants(0.0), InvalidArgument);
  EXPECT_THROW(htp_constants(-0.1), InvalidArgument);
  EXPECT_THROW(htp_constants(1 / std::sqrt(3.0)), InvalidArgument);
  EXPECT_THROW(htp_constants(std::nan("")), InvalidArgument);
}

TEST(Omega, QuotedBasinSizes) {
  const OmegaBounds a = omega_bounds(0.08, 0.08);
  ASSERT_TRUE(a.feasible);
  EXPECT_GE(std::sin(a.omega_sup), 0.85);
  const OmegaBounds b = omega_bounds(0.04, 0.04);
  ASSERT_TRUE(b.feasible);
  EXPECT_GE(std::sin(b.omega_sup), 0.97);
}

TEST(Omega, NoiselessLowerEndIsZero) {
  for (double d : {0.01, 0.08, 0.2}) {
    const OmegaBounds o = omega_bounds(d, 0.0);
    ASSERT_TRUE(o.feasible);
    EXPECT_EQ(o.omega_inf, 0.0);
    EXPECT_EQ(contraction_map(0.0, d, 0.0), 0.0);
  }
}

TEST(Omega, EndpointsAreFixedPoints) {
  for (double d : {0.02, 0.05, 0.08, 0.1}) {
    for (double nu : {0.0, 0.01, 0.04, 0.08}) {
      const OmegaBounds o = omega_bounds(d, nu);
      if (!o.feasible) continue;
      EXPECT_LE(o.omega_inf, o.omega_sup);
      EXPECT_NEAR(o.omega_inf, contraction_map(o.omega_inf, d, nu), 1e-8);
      EXPECT_NEAR(o.omega_sup, contraction_map(o.omega_sup, d, nu), 1e-8);
      // Omega lies between them.
      const double mid = 0.5 * (o.omega_inf + o.omega_sup);
      EXPECT_GE(mid, contraction_map(mid, d, nu));
    }
  }
}

TEST(Omega, SupNonIncreasingInDeltaAndNu) {
  for (double nu : {0.0, 0.02, 0.05}) {
    double prev = std::numbers::pi / 2;
    for (double d = 0.01; d <= 0.12; d += 0.01) {
      const OmegaBounds o = omega_bounds(d, nu);
      if (!o.feasible) break;
      EXPECT_LE(o.omega_sup, prev + 1e-12);
      prev = o.omega_sup;
    }
  }
  for (double d : {0.02, 0.08}) {
    double prev = std::numbers::pi / 2;
    for (double nu = 0.0; nu <= 0.1; nu += 0.01) {
      const OmegaBounds o = omega_bounds(d, nu);
      if (!o.feasible) break;
      EXPECT_LE(o.omega_sup, prev + 1e-12);
      prev = o.omega_sup;
    }
  }
}

TEST(Omega, InfeasibleRegime) {
  EXPECT_FALSE(omega_bounds(0.5, 0.3).feasible);
  EXPECT_TRUE(std::isinf(contraction_map(1.5, 0.5, 0.3)));
  EXPECT_THROW(noise_amp_constant(0.5, 0.3), InvalidArgument);
}

TEST(NoiseAmp, QuotedConstantsAtDelta008) {
  const NoiseAmplification a = noise_amp_constant(0.08, 0.08);
  EXPECT_NEAR(a.sin_theta, 4.45, 0.02);
  EXPECT_NEAR(a.frobenius, 4.82, 0.02);
  EXPECT_NEAR(a.frobenius, a.sin_theta * frobenius_factor(0.08), 1e-12);
  // fixed_point = sin(w~) / nu0
  EXPECT_NEAR(a.fixed_point, std::sin(omega_bounds(0.08, 0.08).omega_inf) / 0.08, 1e-6);
  EXPECT_LE(a.fixed_point, a.sin_theta);
}

TEST(NoiseAmp, FrobeniusFactor) {
  EXPECT_EQ(frobenius_factor(0.0), 1.0);
  EXPECT_NEAR(frobenius_factor(0.5), std::sqrt(3.0), 1e-15);
  EXPECT_THROW(frobenius_factor(1.0), InvalidArgument);
}

TEST(NoiseAmp, NonDecreasingInDelta) {
  for (double nu : {0.01, 0.04}) {
    NoiseAmplification prev{};
    for (double d = 0.01; d <= 0.1; d += 0.005) {
      const NoiseAmplification a = noise_amp_constant(d, nu);
      EXPECT_GE(a.sin_theta, prev.sin_theta);
      EXPECT_GE(a.frobenius, prev.frobenius);
      EXPECT_GE(a.fixed_point, prev.fixed_point);
      prev = a;
    }
  }
}

TEST(LowerBounds, DofBound) {
  EXPECT_EQ(dof_bound(16, 16), 30);
  EXPECT_EQ(dof_bound(1, 1), 0);
  EXPECT_THROW(dof_bound(0, 3), InvalidArgument);
}

TEST(LowerBounds, MeasurementBound) {
  const double D = 1.0 / (12.0 * std::numbers::e);
  const double sigma2 = 0.5;
  EXPECT_NEAR(measurement_lower_bound(10, 6, D, sigma2), (14.0 - 7.0) / std::log(3.0), 1e-12);
  // More noise needs more measurements: with a positive numerator the bound
  // grows with sigma2, with a negative one it falls.
  double prev = measurement_lower_bound(20, 20, 0.001, 0.01);
  for (double s2 = 0.02; s2 < 10; s2 *= 2) {
    const double v = measurement_lower_bound(20, 20, 0.001, s2);
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = measurement_lower_bound(2, 2, 0.05, 0.01);
  for (double s2 = 0.02; s2 < 10; s2 *= 2) {
    const double v = measurement_lower_bound(2, 2, 0.05, s2);
    EXPECT_LT(v, prev);
    prev = v;
  }
  const double near = measurement_lower_bound(20, 20, 1.0 / 12 - 1e-12, sigma2);
  EXPECT_NEAR(near, -7.0 / std::log(1 + 1 / sigma2), 1e-9);
  EXPECT_THROW(measurement_lower_bound(4, 4, 1.0 / 12, 1.0), InvalidArgument);
  EXPECT_THROW(measurement_lower_bound(4, 4, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(measurement_lower_bound(4, 4, 0.01, 0.0), InvalidArgument);
}

TEST(LowerBounds, RateDistortion) {
  EXPECT_NEAR(rate_distortion_lower(2, 1.0 / 6), -3.5, 1e-12);
  for (std::size_t n : {2u, 10u, 1000u}) EXPECT_EQ(rate_distortion_lower(n, 0.5), -3.5);
  EXPECT_NEAR(rate_distortion_lower(3, 1.0 / (6 * std::numbers::e)), -1.5, 1e-12);
  EXPECT_THROW(rate_distortion_lower(1, 0.1), InvalidArgument);
  EXPECT_THROW(rate_distortion_lower(4, 2.0), InvalidArgument);
}

TEST(LowerBounds, RipSampleSize) {
  EXPECT_NEAR(rip_sample_size(2.0, 1, 4, 8, 64, 32), 2.0 * 12 * std::log(16.0), 1e-12);
}

TEST(EmpiricalRip, ExactIsometry) {
  const MeasurementOperator A = vectorization_operator(12, 10);
  EXPECT_LE(empirical_rip(A, 1, 3, 4, 200, 5), 1e-10);
  EXPECT_LE(empirical_rip(A, 2, 3, 4, 200, 5), 1e-10);
}

TEST(EmpiricalRip, RunningMaxInSamples) {
  const MeasurementOperator A = spf::testing::gaussian(40, 16, 16, 3);
  double prev = 0.0;
  for (std::size_t n : {1u, 5u, 20u, 80u}) {
    const double e = empirical_rip(A, 1, 4, 4, n, 17);
    EXPECT_GE(e, prev);
    prev = e;
  }
  EXPECT_THROW(empirical_rip(A, 3, 4, 4, 10, 1), InvalidArgument);
  EXPECT_THROW(empirical_rip(A, 1, 4, 4, 0, 1), InvalidArgument);
  EXPECT_THROW(empirical_rip(A, 1, 17, 4, 10, 1), InvalidArgument);
}

TEST(EmpiricalRip, GaussianBelowHalf) {
  const std::size_t s = 4, n = 64;
  const auto m = static_cast<Eigen::Index>(std::ceil(8.0 * 2 * s * std::log(static_cast<double>(n) / s)));
  int below = 0;
  for (std::uint64_t d = 0; d < 100; ++d) {
    const MeasurementOperator A = spf::testing::gaussian(m, n, n, derive_seed(61, d));
    if (empirical_rip(A, 1, s, s, 100, derive_seed(62, d)) < 0.5) ++below;
  }
  EXPECT_GE(below, 95);
}
