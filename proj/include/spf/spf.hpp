#pragma once

// Sparse power factorization and plain power factorization for rank-one
// matrix recovery from b = A(X) + z.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spf/measurement.hpp"
#include "spf/sparse_solvers.hpp"

namespace spf {

// Ground truth X = lambda u v^* with unit-norm sparse factors.
struct SparseRankOneModel {
  double lambda = 1.0;
  CVector u;
  CVector v;
  std::size_t s1 = 0;
  std::size_t s2 = 0;

  CMatrix matrix() const { return lambda * u * v.adjoint(); }
};

struct SpfConfig {
  std::size_t s1 = 1;
  std::size_t s2 = 1;
  std::size_t max_outer = 50;
  double rel_change_tol = 1e-8;
  // Template for the inner solver; s is overwritten per update and an unset
  // max_iters resolves to htp_iteration_budget(s, 0.08).
  HtpConfig htp;
  std::optional<SparseRankOneModel> oracle;
};

enum class StopReason { Converged, MaxOuter, Degenerate };

std::string to_string(StopReason r);

struct TraceRow {
  std::size_t t = 0;
  double residual = 0.0;
  std::optional<double> sin_theta;
  std::optional<double> sin_phi;
};

struct RecoveryTrace {
  std::vector<TraceRow> rows;
  StopReason stop = StopReason::MaxOuter;
};

// Columns t,residual,sin_theta,sin_phi,stop_reason; stop_reason is filled on
// the last row only. Missing angles are empty fields.
void write_trace_csv(std::ostream& out, const RecoveryTrace& trace);

struct FactorPair {
  CVector u;
  CVector v;
};

struct SpfResult {
  CMatrix X_hat;
  FactorPair factors;
  RecoveryTrace trace;
};

// An update produced a zero factor. Carries the trace up to that point.
class DegenerateIterate : public std::runtime_error {
 public:
  DegenerateIterate(const std::string& what, RecoveryTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const RecoveryTrace& trace() const noexcept { return trace_; }

 private:
  RecoveryTrace trace_;
};

// Each outer iteration: normalize v; u <- HTP(F(v), b, s1) (LS when s1 = n1);
// normalize u; v <- HTP(G(u), conj(b), s2) (LS when s2 = n2). Returns u v^*.
// Stops after max_outer iterations or when the relative Frobenius change of
// u v^* falls below rel_change_tol.
SpfResult spf_run(const MeasurementOperator& A, const CVector& b, const SpfConfig& cfg, const CVector& v0);

// spf_run with both updates forced to least squares.
SpfResult pf_run(const MeasurementOperator& A, const CVector& b, SpfConfig cfg, const CVector& v0);

// min{50, 20 log10(||X|| / ||X_hat - X||)} in dB.
double reconstruction_snr(const CMatrix& X_hat, const CMatrix& X);
// Uncapped 20 log10(||X|| / ||X_hat - X||); +inf for an exact match.
double raw_snr(const CMatrix& X_hat, const CMatrix& X);
// min{3, log10(||X_hat - X|| / (nu ||X||))}.
double noise_amplification(const CMatrix& X_hat, const CMatrix& X, double nu);

}  // namespace spf
