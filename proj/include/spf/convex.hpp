#pragma once

// Convex basis-pursuit baselines solved by ADMM:
//   LR    min ||Z||_*                                    s.t. A(Z) = b
//   RS    min ||Z||_{1,2}                                s.t. A(Z) = b
//   RSLR  min max(||Z||_{1,2}/w_r, ||Z||_*/w_n)          s.t. A(Z) = b
//   DS    min max(||Z||_{1,2}/w_r, ||Z^*||_{1,2}/w_c)    s.t. A(Z) = b
//   DSLR  min max(||Z||_{1,2}/w_r, ||Z^*||_{1,2}/w_c, ||Z||_*/w_n)
// with oracle weights w taken from the true matrix.
//
// LR and RS use two-block ADMM (affine projection / proximal step). The max
// programs are written in epigraph form, min t s.t. g_i(Z) <= w_i t, and solved
// by consensus ADMM with one (Z, t) copy per norm constraint plus one for the
// affine constraint and the objective.

#include <cstddef>
#include <optional>
#include <string>

#include "spf/measurement.hpp"

namespace spf {

struct AdmmConfig {
  double penalty = 1.0;
  std::size_t max_iters = 2000;
  double primal_tol = 1e-6;
  double dual_tol = 1e-6;
};

enum class BpVariant { LR, RS, RSLR, DS, DSLR };

std::string to_string(BpVariant v);

double nuclear_norm(const CMatrix& Z);
// Sum of row l2 norms.
double row_l12_norm(const CMatrix& Z);
// ||Z^*||_{1,2}: sum of column l2 norms.
double col_l12_norm(const CMatrix& Z);

struct OracleWeights {
  std::optional<double> row_l12;
  std::optional<double> col_l12;
  std::optional<double> nuclear;

  static OracleWeights from_matrix(const CMatrix& X);
};

struct BpProblem {
  const MeasurementOperator* A = nullptr;
  CVector b;
  OracleWeights weights;
};

struct BpResult {
  CMatrix Z;
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  // The Gram system needed a ridge to factor.
  bool gram_regularized = false;
};

// Soft-threshold singular values by t.
CMatrix prox_nuclear(const CMatrix& Z, double t);
// Scale each row r by max(0, 1 - t / ||r||).
CMatrix prox_row_l12(const CMatrix& Z, double t);
// Column-wise variant: prox_row_l12 applied to Z^*.
CMatrix prox_col_l12(const CMatrix& Z, double t);

// Euclidean projection of (Z, t) onto { g(Z) <= weight * t } where g is one of
// the three norms above. Bisection on t; the inner step is the projection onto
// the g-ball (simplex projection of singular values or row/column norms).
enum class NormKind { Nuclear, RowL12, ColL12 };
void project_epigraph(NormKind kind, double weight, CMatrix& Z, double& t);

// Projection onto { Z : A(Z) = b }: Z + A^*((A A^*)^{-1}(b - A(Z))). The m x m
// Gram factorization is computed once and reused.
class AffineProjector {
 public:
  explicit AffineProjector(const MeasurementOperator& A);
  CMatrix project(const CVector& b, const CMatrix& Z) const;
  bool regularized() const noexcept { return regularized_; }
  const MeasurementOperator& op() const noexcept { return *A_; }

 private:
  const MeasurementOperator* A_;
  Eigen::LLT<CMatrix> gram_;
  bool regularized_ = false;
};

CMatrix project_affine(const MeasurementOperator& A, const CVector& b, const CMatrix& Z);

// Throws InvalidArgument when a weight required by the variant is missing or
// not positive.
BpResult bp_solve(const BpProblem& problem, BpVariant variant, const AdmmConfig& cfg);
BpResult bp_solve(const BpProblem& problem, BpVariant variant, const AdmmConfig& cfg,
                  const AffineProjector& projector);

}  // namespace spf
