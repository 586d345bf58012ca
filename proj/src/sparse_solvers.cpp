#include "spf/sparse_solvers.hpp"

#include <string>

namespace spf {

std::size_t resolved_max_iters(const HtpConfig& cfg) {
  return cfg.max_iters.value_or(htp_iteration_budget(cfg.s, kDefaultHtpDelta));
}

LeastSquaresResult solve_least_squares(const CMatrix& Phi, const CVector& b, double rank_tol) {
  if (Phi.rows() != b.size())
    throw InvalidArgument("least_squares: matrix has " + std::to_string(Phi.rows()) +
                          " rows but rhs has length " + std::to_string(b.size()));
  LeastSquaresResult out;
  if (Phi.cols() == 0) {
    out.x = CVector(0);
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
  cod.setThreshold(rank_tol);
  cod.compute(Phi);
  out.rank = cod.rank();
  out.rank_deficient = out.rank < Phi.cols();
  out.x = out.rank == 0 ? CVector::Zero(Phi.cols()).eval() : CVector(cod.solve(b));
  return out;
}

CVector least_squares(const CMatrix& Phi, const CVector& b) {
  return solve_least_squares(Phi, b).x;
}

HtpResult htp(const CMatrix& Phi, const CVector& b, const HtpConfig& cfg) {
  if (Phi.rows() != b.size())
    throw InvalidArgument("htp: sensing matrix has " + std::to_string(Phi.rows()) +
                          " rows but measurements have length " + std::to_string(b.size()));
  if (cfg.s < 1) throw InvalidArgument("htp: sparsity must be >= 1");
  if (!(cfg.gamma > 0.0)) throw InvalidArgument("htp: step size must be positive");
  const std::size_t max_iters = resolved_max_iters(cfg);
  if (max_iters < 1) throw InvalidArgument("htp: max_iters must be >= 1");

  const Eigen::Index n = Phi.cols();
  HtpResult out;
  out.x_hat = CVector::Zero(n);
  out.support = IndexSet(static_cast<std::size_t>(n));
  CVector residual = b;

  for (std::size_t t = 1; t <= max_iters; ++t) {
    out.iterations = t;
    const CVector proxy = out.x_hat + cfg.gamma * (Phi.adjoint() * residual);
    IndexSet J = support(hard_threshold(proxy, cfg.s));
    if (J == out.support) {
      // Same support gives the same restricted solution.
      out.support_stable = true;
      if (cfg.stop == HtpStop::SupportStable) break;
      continue;
    }
    CMatrix restricted(Phi.rows(), static_cast<Eigen::Index>(J.size()));
    for (std::size_t k = 0; k < J.size(); ++k)
      restricted.col(static_cast<Eigen::Index>(k)) = Phi.col(static_cast<Eigen::Index>(J[k]));
    const LeastSquaresResult ls = solve_least_squares(restricted, b, cfg.rank_tol);
    out.rank_deficient = out.rank_deficient || ls.rank_deficient;
    out.x_hat.setZero();
    for (std::size_t k = 0; k < J.size(); ++k)
      out.x_hat[static_cast<Eigen::Index>(J[k])] = ls.x[static_cast<Eigen::Index>(k)];
    out.support = support(out.x_hat);
    out.support_stable = false;
    residual = b - Phi * out.x_hat;
  }
  out.residual_norm = residual.norm();
  return out;
}

}  // namespace spf
