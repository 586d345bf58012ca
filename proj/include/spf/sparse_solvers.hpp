#pragma once

// Hard Thresholding Pursuit and dense least squares.

#include <cstddef>
#include <optional>

#include "spf/numerics.hpp"
#include "spf/theory.hpp"

namespace spf {

enum class HtpStop {
  SupportStable,  // stop when J_t == J_{t-1}, capped by max_iters
  BudgetOnly,     // always run max_iters iterations
};

struct HtpConfig {
  std::size_t s = 1;
  double gamma = 1.0;
  // Unset: htp_iteration_budget(s, 0.08).
  std::optional<std::size_t> max_iters;
  HtpStop stop = HtpStop::SupportStable;
  // Relative rank tolerance of the support-restricted solve.
  double rank_tol = 1e-12;
};

struct HtpResult {
  CVector x_hat;
  std::size_t iterations = 0;
  IndexSet support;
  double residual_norm = 0.0;
  // Some restricted solve was rank deficient and fell back to minimum norm.
  bool rank_deficient = false;
  bool support_stable = false;
};

inline constexpr double kDefaultHtpDelta = 0.08;

// ceil(L + K s) inner iterations; see theory::htp_constants.
using theory::htp_iteration_budget;

std::size_t resolved_max_iters(const HtpConfig& cfg);

// x_0 = 0; J = supp H_s(x + gamma Phi^*(b - Phi x)); x = argmin ||b - Phi x|| over supp x in J.
HtpResult htp(const CMatrix& Phi, const CVector& b, const HtpConfig& cfg);

struct LeastSquaresResult {
  CVector x;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
};

// Minimizer of ||b - Phi x||_2; the minimum-norm one when Phi is rank deficient.
// Column-pivoted orthogonal factorization with relative rank tolerance rank_tol.
LeastSquaresResult solve_least_squares(const CMatrix& Phi, const CVector& b, double rank_tol = 1e-12);
CVector least_squares(const CMatrix& Phi, const CVector& b);

}  // namespace spf
