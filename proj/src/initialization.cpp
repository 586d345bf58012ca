#include "spf/initialization.hpp"

#include <limits>
#include <string>
#include <vector>

namespace spf {

std::string to_string(InitMethod m) {
  switch (m) {
    case InitMethod::Optimal: return "optimal";
    case InitMethod::Thresholding: return "thresh";
    case InitMethod::RowSparseSpectral: return "rowsparse-s";
    case InitMethod::RowSparseFrobenius: return "rowsparse-f";
    case InitMethod::PfProxy: return "proxy";
  }
  return "unknown";
}

namespace {

void check_sparsity(std::size_t s, Eigen::Index n, const char* what) {
  if (s < 1 || s > static_cast<std::size_t>(n))
    throw InvalidArgument(std::string(what) + ": sparsity " + std::to_string(s) + " outside [1, " +
                          std::to_string(n) + "]");
}

void check_nonzero(const CMatrix& proxy, const char* what) {
  if (proxy.size() == 0 || proxy.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateInput(std::string(what) + ": proxy matrix is zero");
}

CMatrix submatrix(const CMatrix& P, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  CMatrix S(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          P(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
  return S;
}

double spectral_norm(const CMatrix& S) {
  Eigen::JacobiSVD<CMatrix> svd(S);
  return svd.singularValues()[0];
}

// Lexicographically ordered best candidate: larger value wins, then lower rank.
struct Candidate {
  double value = -1.0;
  std::uint64_t rank = std::numeric_limits<std::uint64_t>::max();

  bool better_than(const Candidate& o) const {
    return value > o.value || (value == o.value && rank < o.rank);
  }
};

// Right factor supported on `cols`, from the leading right singular vector of
// the rows x cols submatrix.
CVector scatter_right(const CMatrix& P, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  const LeadingPair lp = leading_pair(submatrix(P, rows, cols));
  CVector v0 = CVector::Zero(P.cols());
  for (std::size_t j = 0; j < cols.size(); ++j)
    v0[static_cast<Eigen::Index>(cols[j])] = lp.right[static_cast<Eigen::Index>(j)];
  return v0;
}

IndexSet as_index_set(std::size_t universe, std::span<const std::size_t> idx) {
  return IndexSet(universe, std::vector<std::size_t>(idx.begin(), idx.end()));
}

}  // namespace

std::uint64_t optimal_init_candidates(std::size_t n1, std::size_t s1, std::size_t n2, std::size_t s2) {
  const std::uint64_t a = binomial(n1, s1);
  const std::uint64_t b = binomial(n2, s2);
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

InitResult init_optimal_from_proxy(const CMatrix& proxy, std::size_t s1, std::size_t s2, std::uint64_t budget) {
  check_sparsity(s1, proxy.rows(), "init_optimal");
  check_sparsity(s2, proxy.cols(), "init_optimal");
  const auto n1 = static_cast<std::size_t>(proxy.rows());
  const auto n2 = static_cast<std::size_t>(proxy.cols());
  const std::uint64_t count = optimal_init_candidates(n1, s1, n2, s2);
  if (count > budget) throw CombinatorialBudgetError(count, budget);
  check_nonzero(proxy, "init_optimal");

  const std::uint64_t row_sets = binomial(n1, s1);
  const std::uint64_t col_sets = binomial(n2, s2);
  Candidate best;
#pragma omp parallel
  {
    Candidate local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(row_sets); ++r) {
      const auto rows = combination_at(n1, s1, static_cast<std::uint64_t>(r));
      std::uint64_t c = 0;
      for_each_combination(n2, s2, [&](std::span<const std::size_t> cols) {
        const Candidate cand{spectral_norm(submatrix(proxy, rows, cols)),
                             static_cast<std::uint64_t>(r) * col_sets + c++};
        if (cand.better_than(local)) local = cand;
        return true;
      });
    }
#pragma omp critical(spf_init_optimal)
    if (local.better_than(best)) best = local;
  }

  const auto rows = combination_at(n1, s1, best.rank / col_sets);
  const auto cols = combination_at(n2, s2, best.rank % col_sets);
  InitResult out;
  out.method = InitMethod::Optimal;
  out.J1_hat = as_index_set(n1, rows);
  out.J2_hat = as_index_set(n2, cols);
  out.v0 = scatter_right(proxy, rows, cols);
  return out;
}

InitResult init_optimal(const MeasurementOperator& A, const CVector& b, std::size_t s1, std::size_t s2,
                        std::uint64_t budget) {
  const std::uint64_t count = optimal_init_candidates(static_cast<std::size_t>(A.n1()), s1,
                                                      static_cast<std::size_t>(A.n2()), s2);
  check_sparsity(s1, A.n1(), "init_optimal");
  check_sparsity(s2, A.n2(), "init_optimal");
  if (count > budget) throw CombinatorialBudgetError(count, budget);
  return init_optimal_from_proxy(adjoint(A, b), s1, s2, budget);
}

ThresholdingProjection project_sparse_rows(const CMatrix& proxy, std::size_t s1, std::size_t s2) {
  check_sparsity(s1, proxy.rows(), "project_sparse_rows");
  check_sparsity(s2, proxy.cols(), "project_sparse_rows");
  std::vector<CVector> thresholded(static_cast<std::size_t>(proxy.rows()));
  RVector row_scores(proxy.rows());
  for (Eigen::Index i = 0; i < proxy.rows(); ++i) {
    thresholded[static_cast<std::size_t>(i)] = hard_threshold(proxy.row(i).transpose(), s2);
    row_scores[i] = thresholded[static_cast<std::size_t>(i)].norm();
  }
  ThresholdingProjection out;
  out.rows = top_s_indices(row_scores, s1);
  out.projected = CMatrix::Zero(proxy.rows(), proxy.cols());
  for (std::size_t i : out.rows)
    out.projected.row(static_cast<Eigen::Index>(i)) = thresholded[i].transpose();
  out.cols = top_s_indices(out.projected.colwise().norm().transpose(), s2);
  return out;
}

InitResult init_thresholding_from_proxy(const CMatrix& proxy, std::size_t s1, std::size_t s2) {
  check_sparsity(s1, proxy.rows(), "init_thresholding");
  check_sparsity(s2, proxy.cols(), "init_thresholding");
  check_nonzero(proxy, "init_thresholding");
  ThresholdingProjection proj = project_sparse_rows(proxy, s1, s2);
  CMatrix restricted = CMatrix::Zero(proxy.rows(), proxy.cols());
  for (std::size_t k : proj.cols)
    restricted.col(static_cast<Eigen::Index>(k)) = proj.projected.col(static_cast<Eigen::Index>(k));
  InitResult out;
  out.method = InitMethod::Thresholding;
  out.v0 = leading_pair(restricted).right;
  out.J1_hat = std::move(proj.rows);
  out.J2_hat = std::move(proj.cols);
  return out;
}

InitResult init_thresholding(const MeasurementOperator& A, const CVector& b, std::size_t s1, std::size_t s2) {
  return init_thresholding_from_proxy(adjoint(A, b), s1, s2);
}

InitResult init_rowsparse_from_proxy(const CMatrix& proxy, std::size_t s1, RowNorm norm, std::uint64_t budget) {
  check_sparsity(s1, proxy.rows(), "init_rowsparse");
  const auto n1 = static_cast<std::size_t>(proxy.rows());
  const auto n2 = static_cast<std::size_t>(proxy.cols());
  if (norm == RowNorm::Spectral) {
    const std::uint64_t count = binomial(n1, s1);
    if (count > budget) throw CombinatorialBudgetError(count, budget);
  }
  check_nonzero(proxy, "init_rowsparse");

  IndexSet rows;
  if (norm == RowNorm::Frobenius) {
    rows = top_s_indices(proxy.rowwise().norm(), s1);
  } else {
    const std::uint64_t count = binomial(n1, s1);
    const auto all_cols = IndexSet::full(n2);
    Candidate best;
#pragma omp parallel
    {
      Candidate local;
#pragma omp for schedule(dynamic, 16) nowait
      for (std::int64_t r = 0; r < static_cast<std::int64_t>(count); ++r) {
        const auto J = combination_at(n1, s1, static_cast<std::uint64_t>(r));
        const Candidate cand{spectral_norm(submatrix(proxy, J, all_cols.indices())), static_cast<std::uint64_t>(r)};
        if (cand.better_than(local)) local = cand;
      }
#pragma omp critical(spf_init_rowsparse)
      if (local.better_than(best)) best = local;
    }
    rows = as_index_set(n1, combination_at(n1, s1, best.rank));
  }

  InitResult out;
  out.method = norm == RowNorm::Spectral ? InitMethod::RowSparseSpectral : InitMethod::RowSparseFrobenius;
  out.v0 = leading_pair(coord_project(proxy, rows)).right;
  out.J1_hat = std::move(rows);
  out.J2_hat = IndexSet::full(n2);
  return out;
}

InitResult init_rowsparse(const MeasurementOperator& A, const CVector& b, std::size_t s1, RowNorm norm,
                          std::uint64_t budget) {
  check_sparsity(s1, A.n1(), "init_rowsparse");
  if (norm == RowNorm::Spectral) {
    const std::uint64_t count = binomial(static_cast<std::size_t>(A.n1()), s1);
    if (count > budget) throw CombinatorialBudgetError(count, budget);
  }
  return init_rowsparse_from_proxy(adjoint(A, b), s1, norm, budget);
}

InitResult init_pf_proxy_from_proxy(const CMatrix& proxy) {
  check_nonzero(proxy, "init_pf_proxy");
  InitResult out;
  out.method = InitMethod::PfProxy;
  out.v0 = leading_pair(proxy).right;
  out.J1_hat = IndexSet::full(static_cast<std::size_t>(proxy.rows()));
  out.J2_hat = IndexSet::full(static_cast<std::size_t>(proxy.cols()));
  return out;
}

InitResult init_pf_proxy(const MeasurementOperator& A, const CVector& b) {
  return init_pf_proxy_from_proxy(adjoint(A, b));
}

}  // namespace spf
