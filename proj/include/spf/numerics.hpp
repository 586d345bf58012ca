#pragma once

// Dense complex linear-algebra primitives shared by the solvers.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spf/errors.hpp"

namespace spf {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;

// Throws InvalidArgument when any entry is NaN or Inf.
void require_finite(const CVector& x, std::string_view what);
void require_finite(const CMatrix& x, std::string_view what);

// Round-trip text for CSV/JSON output (%.17g).
std::string format_double(double v);

// Strictly increasing 0-based coordinates within a universe [0, n).
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::size_t universe) : universe_(universe) {}
  // Sorts and validates; duplicates or out-of-range entries throw.
  IndexSet(std::size_t universe, std::vector<std::size_t> indices);
  IndexSet(std::size_t universe, std::initializer_list<std::size_t> indices)
      : IndexSet(universe, std::vector<std::size_t>(indices)) {}

  static IndexSet full(std::size_t universe);

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::size_t i) const;
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t operator[](std::size_t k) const { return indices_[k]; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::size_t> indices_;
};

// Positions of the s largest-magnitude entries, ties to the lowest index.
// Returned in increasing order; min(s, n) positions.
IndexSet top_s_indices(const RVector& magnitudes, std::size_t s);

// Nonzero coordinates of x.
IndexSet support(const CVector& x);

// H_s: zero all but the s largest-magnitude entries.
CVector hard_threshold(const CVector& x, std::size_t s);

// l2 norm of the best s-sparse approximation.
double sparse_norm(const CVector& x, std::size_t s);

// Pi_J (or Pi_J^perp when complement is set). For matrices J indexes rows.
CVector coord_project(const CVector& x, const IndexSet& J, bool complement = false);
CMatrix coord_project(const CMatrix& rows, const IndexSet& J, bool complement = false);

struct LeadingPair {
  double sigma = 0.0;
  CVector left;
  CVector right;
};

// Largest singular value with unit singular vectors. Zero input throws DegenerateInput.
LeadingPair leading_pair(const CMatrix& M);

// sin of the principal angle between span(a) and span(b).
double subspace_sin(const CVector& a, const CVector& b);

// Number of nonzero entries.
std::size_t nnz(const CVector& x);

// Binomial coefficient saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k);

// Visits all k-subsets of [0, n) in lexicographic order. Returns false from
// the visitor to stop early.
template <typename Visitor>
void for_each_combination(std::size_t n, std::size_t k, Visitor&& visit) {
  if (k > n) return;
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  while (true) {
    if (!visit(std::span<const std::size_t>(c))) return;
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

// k-subset of [0, n) at lexicographic rank r (0-based).
std::vector<std::size_t> combination_at(std::size_t n, std::size_t k, std::uint64_t rank);

}  // namespace spf
