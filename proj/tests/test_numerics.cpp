#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spf/numerics.hpp"
#include "test_util.hpp"

using namespace spf;
using spf::testing::random_matrix;
using spf::testing::random_vector;

namespace {

CVector vec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (Complex x : xs) v[i++] = x;
  return v;
}

const Complex I{0.0, 1.0};

}  // namespace

TEST(HardThreshold, KeepsLargestMagnitudes) {
  EXPECT_EQ(hard_threshold(vec({3, -1, 2}), 2), vec({3, 0, 2}));
  EXPECT_EQ(hard_threshold(vec({3.0 * I, 2, -2}), 1), vec({3.0 * I, 0, 0}));
}

TEST(HardThreshold, FullSparsityIsIdentity) {
  const CVector x = random_vector(1, 7);
  EXPECT_EQ(hard_threshold(x, 7), x);
  EXPECT_EQ(hard_threshold(x, 20), x);
}

TEST(HardThreshold, ZeroSparsityThrows) { EXPECT_THROW(hard_threshold(vec({1, 2}), 0), InvalidArgument); }

TEST(HardThreshold, TiesGoToLowestIndex) {
  EXPECT_EQ(hard_threshold(vec({1, 2, 2, 2}), 2), vec({0, 2, 2, 0}));
  EXPECT_EQ(hard_threshold(vec({-1, 1.0 * I, 1}), 1), vec({-1, 0, 0}));
}

TEST(HardThreshold, Idempotent) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CVector x = random_vector(seed, 9);
    for (std::size_t s = 1; s <= 9; ++s) {
      const CVector h = hard_threshold(x, s);
      EXPECT_EQ(hard_threshold(h, s), h);
      EXPECT_LE(nnz(h), s);
    }
  }
}

// Exhaustive check: ||x - H_s(x)|| equals the best error over all supports.
TEST(HardThreshold, OptimalByEnumeration) {
  for (Eigen::Index n = 1; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const CVector x = random_vector(100 * static_cast<std::uint64_t>(n) + seed, n);
      for (std::size_t s = 1; s <= static_cast<std::size_t>(n); ++s) {
        double best = std::numeric_limits<double>::infinity();
        for_each_combination(static_cast<std::size_t>(n), s, [&](std::span<const std::size_t> J) {
          CVector r = x;
          for (std::size_t j : J) r[static_cast<Eigen::Index>(j)] = 0.0;
          best = std::min(best, r.norm());
          return true;
        });
        EXPECT_NEAR((x - hard_threshold(x, s)).norm(), best, 1e-12);
      }
    }
  }
}

TEST(SparseNorm, Examples) {
  const CVector x = vec({3, 4, 0});
  EXPECT_DOUBLE_EQ(sparse_norm(x, 1), 4.0);
  EXPECT_DOUBLE_EQ(sparse_norm(x, 2), 5.0);
  EXPECT_DOUBLE_EQ(sparse_norm(x, 3), 5.0);
  EXPECT_THROW(sparse_norm(x, 0), InvalidArgument);
}

TEST(SparseNorm, Pythagoras) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const CVector x = random_vector(seed, 16);
    for (std::size_t s : {1, 3, 8, 15}) {
      const double a = sparse_norm(x, s);
      const double b = (x - hard_threshold(x, s)).norm();
      EXPECT_NEAR(a * a + b * b, x.squaredNorm(), 1e-10 * x.squaredNorm());
    }
  }
}

TEST(CoordProject, Examples) {
  const IndexSet J(3, {0, 2});
  EXPECT_EQ(coord_project(vec({1, 2, 3}), J), vec({1, 0, 3}));
  EXPECT_EQ(coord_project(vec({1, 2, 3}), J, true), vec({0, 2, 0}));
  EXPECT_EQ(coord_project(vec({1, 2, 3}), IndexSet::full(3), true), CVector::Zero(3));
}

TEST(CoordProject, PartitionOfIdentity) {
  const CVector x = random_vector(4, 10);
  const IndexSet J(10, {1, 4, 5, 9});
  EXPECT_EQ(coord_project(x, J) + coord_project(x, J, true), x);
  const CMatrix M = random_matrix(5, 10, 3);
  EXPECT_EQ(coord_project(M, J) + coord_project(M, J, true), M);
}

TEST(CoordProject, MatrixProjectsRows) {
  const CMatrix M = random_matrix(6, 4, 3);
  const CMatrix P = coord_project(M, IndexSet(4, {1, 3}));
  EXPECT_EQ(P.row(0).norm(), 0.0);
  EXPECT_EQ(P.row(2).norm(), 0.0);
  EXPECT_EQ(P.row(1), M.row(1));
  EXPECT_EQ(P.row(3), M.row(3));
}

TEST(CoordProject, OutOfRangeThrows) {
  EXPECT_THROW(coord_project(vec({1, 2, 3}), IndexSet(5, {4})), InvalidArgument);
  EXPECT_THROW(coord_project(CMatrix(CMatrix::Zero(2, 2)), IndexSet(3, {2})), InvalidArgument);
}

TEST(IndexSet, ValidatesEntries) {
  EXPECT_THROW(IndexSet(3, {0, 3}), InvalidArgument);
  EXPECT_THROW(IndexSet(3, {1, 1}), InvalidArgument);
  const IndexSet J(5, {4, 0, 2});
  EXPECT_EQ(std::vector<std::size_t>(J.begin(), J.end()), (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_TRUE(J.contains(2));
  EXPECT_FALSE(J.contains(1));
}

TEST(LeadingPair, Diagonal) {
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 1.0;
  const LeadingPair lp = leading_pair(D);
  EXPECT_NEAR(lp.sigma, 3.0, 1e-14);
  EXPECT_NEAR(std::abs(lp.left[0]), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(lp.right[0]), 1.0, 1e-14);
}

TEST(LeadingPair, RankOne) {
  CVector u = random_vector(1, 6), v = random_vector(2, 4);
  u /= u.norm();
  v /= v.norm();
  const LeadingPair lp = leading_pair(2.5 * u * v.adjoint());
  EXPECT_NEAR(lp.sigma, 2.5, 1e-12);
  EXPECT_LT(subspace_sin(lp.right, v), 1e-7);
  EXPECT_LT(subspace_sin(lp.left, u), 1e-7);
}

TEST(LeadingPair, ZeroThrows) { EXPECT_THROW(leading_pair(CMatrix::Zero(3, 2)), DegenerateInput); }

// Full SVD oracle: u1 s1 v1^* is the best rank-one approximation (Eckart-Young).
TEST(LeadingPair, MatchesFullSvdOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto [r, c] : {std::pair{5, 4}, std::pair{40, 30}}) {
      const CMatrix M = random_matrix(seed, r, c);
      Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const RVector s = svd.singularValues();
      const LeadingPair lp = leading_pair(M);
      EXPECT_NEAR(lp.sigma, s[0], 1e-10 * s[0]);
      EXPECT_NEAR(lp.left.norm(), 1.0, 1e-12);
      EXPECT_NEAR(lp.right.norm(), 1.0, 1e-12);
      EXPECT_LE((M * lp.right - lp.sigma * lp.left).norm(), 1e-8 * M.norm());
      const double best_err2 = s.squaredNorm() - s[0] * s[0];
      const double err2 = (M - lp.sigma * lp.left * lp.right.adjoint()).squaredNorm();
      EXPECT_NEAR(err2, best_err2, 1e-9 * M.squaredNorm());
    }
  }
}

TEST(SubspaceSin, Examples) {
  const CVector e0 = vec({1, 0}), e1 = vec({0, 1});
  EXPECT_NEAR(subspace_sin(e0, std::polar(1.0, 0.7) * e0), 0.0, 1e-15);
  EXPECT_NEAR(subspace_sin(e0, e1), 1.0, 1e-15);
  EXPECT_NEAR(subspace_sin(vec({1, 1}) / std::sqrt(2.0), e0), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_THROW(subspace_sin(CVector::Zero(2), e0), DegenerateInput);
}

TEST(SubspaceSin, ScaleInvariant) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CVector a = random_vector(seed, 5), b = random_vector(seed + 1000, 5);
    const Complex c = random_vector(seed + 2000, 1)[0], d = random_vector(seed + 3000, 1)[0];
    EXPECT_NEAR(subspace_sin(a, b), subspace_sin(c * a, d * b), 1e-12);
    const double s = subspace_sin(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Combinatorics, BinomialAndEnumeration) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(64, 32), 1832624140942590534u);
  EXPECT_EQ(binomial(3, 5), 0u);
  EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
  std::uint64_t rank = 0;
  for_each_combination(7, 3, [&](std::span<const std::size_t> c) {
    EXPECT_EQ(combination_at(7, 3, rank), std::vector<std::size_t>(c.begin(), c.end()));
    ++rank;
    return true;
  });
  EXPECT_EQ(rank, binomial(7, 3));
}

TEST(Finite, RejectsNaN) {
  CVector x = CVector::Zero(3);
  EXPECT_NO_THROW(require_finite(x, "x"));
  x[1] = Complex(std::nan(""), 0.0);
  EXPECT_THROW(require_finite(x, "x"), InvalidArgument);
}

TEST(FormatDouble, RoundTrips) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(std::numbers::pi)), std::numbers::pi);
}
