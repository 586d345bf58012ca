#include "spf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

namespace spf {

namespace {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Complex z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_finite(const CVector& x, std::string_view what) {
  if (!all_finite(x)) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

void require_finite(const CMatrix& x, std::string_view what) {
  if (!all_finite(x)) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

IndexSet::IndexSet(std::size_t universe, std::vector<std::size_t> indices)
    : universe_(universe), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= universe_)
      throw InvalidArgument("IndexSet: index " + std::to_string(indices_[k]) +
                            " out of range for universe " + std::to_string(universe_));
    if (k > 0 && indices_[k] == indices_[k - 1])
      throw InvalidArgument("IndexSet: duplicate index " + std::to_string(indices_[k]));
  }
}

IndexSet IndexSet::full(std::size_t universe) {
  std::vector<std::size_t> all(universe);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return IndexSet(universe, std::move(all));
}

bool IndexSet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

IndexSet top_s_indices(const RVector& magnitudes, std::size_t s) {
  const auto n = static_cast<std::size_t>(magnitudes.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t keep = std::min(s, n);
  // Larger magnitude first; equal magnitudes keep the lower index.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = magnitudes[static_cast<Eigen::Index>(a)];
                      const double mb = magnitudes[static_cast<Eigen::Index>(b)];
                      return ma > mb || (ma == mb && a < b);
                    });
  order.resize(keep);
  return IndexSet(n, std::move(order));
}

IndexSet support(const CVector& x) {
  std::vector<std::size_t> idx;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != Complex(0.0, 0.0)) idx.push_back(static_cast<std::size_t>(i));
  return IndexSet(static_cast<std::size_t>(x.size()), std::move(idx));
}

std::size_t nnz(const CVector& x) {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) count += x[i] != Complex(0.0, 0.0);
  return count;
}

CVector hard_threshold(const CVector& x, std::size_t s) {
  if (s == 0) throw InvalidArgument("hard_threshold: sparsity must be >= 1");
  if (s >= static_cast<std::size_t>(x.size())) return x;
  const IndexSet keep = top_s_indices(x.cwiseAbs(), s);
  CVector out = CVector::Zero(x.size());
  for (std::size_t i : keep) out[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(i)];
  return out;
}

double sparse_norm(const CVector& x, std::size_t s) {
  if (s == 0) throw InvalidArgument("sparse_norm: sparsity must be >= 1");
  return hard_threshold(x, s).norm();
}

CVector coord_project(const CVector& x, const IndexSet& J, bool complement) {
  const auto n = static_cast<std::size_t>(x.size());
  for (std::size_t i : J)
    if (i >= n) throw InvalidArgument("coord_project: index out of range");
  CVector out = complement ? x : CVector::Zero(x.size());
  for (std::size_t i : J)
    out[static_cast<Eigen::Index>(i)] = complement ? Complex(0.0, 0.0) : x[static_cast<Eigen::Index>(i)];
  return out;
}

CMatrix coord_project(const CMatrix& rows, const IndexSet& J, bool complement) {
  const auto n = static_cast<std::size_t>(rows.rows());
  for (std::size_t i : J)
    if (i >= n) throw InvalidArgument("coord_project: row index out of range");
  CMatrix out = complement ? rows : CMatrix::Zero(rows.rows(), rows.cols());
  for (std::size_t i : J) {
    const auto r = static_cast<Eigen::Index>(i);
    if (complement)
      out.row(r).setZero();
    else
      out.row(r) = rows.row(r);
  }
  return out;
}

LeadingPair leading_pair(const CMatrix& M) {
  if (M.size() == 0 || M.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateInput("leading_pair: matrix is zero");
  LeadingPair out;
  if (std::min(M.rows(), M.cols()) > 16) {
    Eigen::BDCSVD<CMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.sigma = svd.singularValues()[0];
    out.left = svd.matrixU().col(0);
    out.right = svd.matrixV().col(0);
    return out;
  }
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.sigma = svd.singularValues()[0];
  out.left = svd.matrixU().col(0);
  out.right = svd.matrixV().col(0);
  return out;
}

double subspace_sin(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw InvalidArgument("subspace_sin: length mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw DegenerateInput("subspace_sin: zero vector");
  // Norm of the component of b orthogonal to a; sqrt(1 - cos^2) loses half the digits.
  const CVector ua = a / na;
  const CVector ub = b / nb;
  return std::min(1.0, (ub - ua.dot(ub) * ua).norm());
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(r);
}

std::vector<std::size_t> combination_at(std::size_t n, std::size_t k, std::uint64_t rank) {
  std::vector<std::size_t> c;
  c.reserve(k);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t v = next; v < n; ++v) {
      const std::uint64_t block = binomial(n - v - 1, k - slot - 1);
      if (rank < block) {
        c.push_back(v);
        next = v + 1;
        break;
      }
      rank -= block;
    }
  }
  return c;
}

}  // namespace spf
