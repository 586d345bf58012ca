#include "spf/spf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace spf {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::MaxOuter: return "max_outer";
    case StopReason::Degenerate: return "degenerate";
  }
  return "unknown";
}

namespace {

// Sparse update of one factor: HTP when sparsity is below the dimension, LS otherwise.
CVector factor_update(const CMatrix& Phi, const CVector& rhs, std::size_t s, const HtpConfig& tmpl) {
  if (s < static_cast<std::size_t>(Phi.cols())) {
    HtpConfig cfg = tmpl;
    cfg.s = s;
    return htp(Phi, rhs, cfg).x_hat;
  }
  return solve_least_squares(Phi, rhs, tmpl.rank_tol).x;
}

}  // namespace

void write_trace_csv(std::ostream& out, const RecoveryTrace& trace) {
  out << "t,residual,sin_theta,sin_phi,stop_reason\n";
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    out << r.t << ',' << format_double(r.residual) << ',';
    if (r.sin_theta) out << format_double(*r.sin_theta);
    out << ',';
    if (r.sin_phi) out << format_double(*r.sin_phi);
    out << ',';
    if (i + 1 == trace.rows.size()) out << to_string(trace.stop);
    out << '\n';
  }
}

SpfResult spf_run(const MeasurementOperator& A, const CVector& b, const SpfConfig& cfg, const CVector& v0) {
  const auto n1 = static_cast<std::size_t>(A.n1());
  const auto n2 = static_cast<std::size_t>(A.n2());
  if (b.size() != A.m()) throw InvalidArgument("spf_run: measurement length does not match operator");
  if (v0.size() != A.n2()) throw InvalidArgument("spf_run: v0 length does not match n2");
  if (cfg.s1 < 1 || cfg.s1 > n1 || cfg.s2 < 1 || cfg.s2 > n2)
    throw InvalidArgument("spf_run: sparsities must satisfy 1 <= s1 <= n1, 1 <= s2 <= n2");
  if (cfg.max_outer < 1) throw InvalidArgument("spf_run: max_outer must be >= 1");
  if (!(v0.norm() > 0.0)) throw InvalidArgument("spf_run: v0 must be nonzero");
  if (cfg.oracle && (cfg.oracle->u.size() != A.n1() || cfg.oracle->v.size() != A.n2()))
    throw InvalidArgument("spf_run: oracle factors do not match operator shape");

  SpfResult out;
  CVector v = v0;
  CVector u;
  CMatrix X_prev;
  const CVector b_conj = b.conjugate();

  for (std::size_t t = 1; t <= cfg.max_outer; ++t) {
    v /= v.norm();
    u = factor_update(build_F(A, v), b, cfg.s1, cfg.htp);
    const double u_norm = u.norm();
    if (!(u_norm > 0.0)) {
      out.trace.stop = StopReason::Degenerate;
      throw DegenerateIterate("spf_run: left factor vanished at iteration " + std::to_string(t), out.trace);
    }
    u /= u_norm;
    const CMatrix G = build_G(A, u);
    v = factor_update(G, b_conj, cfg.s2, cfg.htp);
    if (!(v.norm() > 0.0)) {
      out.trace.stop = StopReason::Degenerate;
      throw DegenerateIterate("spf_run: right factor vanished at iteration " + std::to_string(t), out.trace);
    }

    TraceRow row;
    row.t = t;
    // A(u v^*) = conj(G(u) v).
    row.residual = (b_conj - G * v).norm();
    if (cfg.oracle) {
      row.sin_theta = subspace_sin(u, cfg.oracle->u);
      row.sin_phi = subspace_sin(v, cfg.oracle->v);
    }
    out.trace.rows.push_back(row);

    CMatrix X = u * v.adjoint();
    if (t > 1) {
      const double change = (X - X_prev).norm() / std::max(X.norm(), std::numeric_limits<double>::min());
      if (change < cfg.rel_change_tol) {
        out.trace.stop = StopReason::Converged;
        X_prev = std::move(X);
        break;
      }
    }
    X_prev = std::move(X);
    out.trace.stop = StopReason::MaxOuter;
  }

  out.X_hat = std::move(X_prev);
  out.factors = {u, v};
  return out;
}

SpfResult pf_run(const MeasurementOperator& A, const CVector& b, SpfConfig cfg, const CVector& v0) {
  cfg.s1 = static_cast<std::size_t>(A.n1());
  cfg.s2 = static_cast<std::size_t>(A.n2());
  return spf_run(A, b, cfg, v0);
}

double raw_snr(const CMatrix& X_hat, const CMatrix& X) {
  if (X_hat.rows() != X.rows() || X_hat.cols() != X.cols())
    throw InvalidArgument("snr: shape mismatch");
  const double ref = X.norm();
  if (!(ref > 0.0)) throw InvalidArgument("snr: reference matrix is zero");
  const double err = (X_hat - X).norm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(ref / err);
}

double reconstruction_snr(const CMatrix& X_hat, const CMatrix& X) {
  return std::min(50.0, raw_snr(X_hat, X));
}

double noise_amplification(const CMatrix& X_hat, const CMatrix& X, double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("noise_amplification: nu must be positive");
  if (X_hat.rows() != X.rows() || X_hat.cols() != X.cols())
    throw InvalidArgument("noise_amplification: shape mismatch");
  const double ref = X.norm();
  if (!(ref > 0.0)) throw InvalidArgument("noise_amplification: reference matrix is zero");
  const double err = (X_hat - X).norm();
  if (err == 0.0) return -std::numeric_limits<double>::infinity();
  return std::min(3.0, std::log10(err / (nu * ref)));
}

}  // namespace spf
