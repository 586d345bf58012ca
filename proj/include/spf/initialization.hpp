#pragma once

// Initial right factors v0 computed from the proxy matrix A^*(b).
//
// Row/column ties are broken by lowest index and exhaustive searches keep the
// lexicographically first maximizer, so results are reproducible.

#include <cstddef>
#include <cstdint>
#include <string>

#include "spf/measurement.hpp"

namespace spf {

enum class InitMethod { Optimal, Thresholding, RowSparseSpectral, RowSparseFrobenius, PfProxy };

std::string to_string(InitMethod m);

struct InitResult {
  CVector v0;
  IndexSet J1_hat;
  IndexSet J2_hat;
  InitMethod method = InitMethod::PfProxy;
};

inline constexpr std::uint64_t kDefaultSupportBudget = 1'000'000;

// C(n1, s1) * C(n2, s2), saturating.
std::uint64_t optimal_init_candidates(std::size_t n1, std::size_t s1, std::size_t n2, std::size_t s2);

// Exhaustive argmax of the spectral norm of Pi_J1 P Pi_J2 over |J1| = s1, |J2| = s2.
InitResult init_optimal(const MeasurementOperator& A, const CVector& b, std::size_t s1, std::size_t s2,
                        std::uint64_t budget = kDefaultSupportBudget);
InitResult init_optimal_from_proxy(const CMatrix& proxy, std::size_t s1, std::size_t s2,
                                   std::uint64_t budget = kDefaultSupportBudget);

// Rows with the s1 largest s2-sparse norms, each row hard-thresholded to s2
// entries (the projection onto S), then the s2 heaviest columns of that.
struct ThresholdingProjection {
  CMatrix projected;
  IndexSet rows;
  IndexSet cols;
};
ThresholdingProjection project_sparse_rows(const CMatrix& proxy, std::size_t s1, std::size_t s2);

InitResult init_thresholding(const MeasurementOperator& A, const CVector& b, std::size_t s1, std::size_t s2);
InitResult init_thresholding_from_proxy(const CMatrix& proxy, std::size_t s1, std::size_t s2);

enum class RowNorm { Spectral, Frobenius };

// J1 = argmax over |J| = s1 of ||Pi_J P|| (spectral, exhaustive within budget)
// or ||Pi_J P||_F (sorting row norms). J2 = [n2].
InitResult init_rowsparse(const MeasurementOperator& A, const CVector& b, std::size_t s1, RowNorm norm,
                          std::uint64_t budget = kDefaultSupportBudget);
InitResult init_rowsparse_from_proxy(const CMatrix& proxy, std::size_t s1, RowNorm norm,
                                     std::uint64_t budget = kDefaultSupportBudget);

// Leading right singular vector of A^*(b).
InitResult init_pf_proxy(const MeasurementOperator& A, const CVector& b);
InitResult init_pf_proxy_from_proxy(const CMatrix& proxy);

}  // namespace spf
