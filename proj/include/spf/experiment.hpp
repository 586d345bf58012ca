#pragma once

// Signal generation, single trials, and Monte-Carlo grids.
//
// Seeds: every trial derives its own seed from the master seed through the
// cell coordinates (derive_seed(derive_seed(derive_seed(master, axis1), axis2), m))
// and then the trial index, so any subset of a grid reproduces the same rows.
// Within a trial, sub-seeds 1..4 drive the operator, the signal, the noise and
// the restart perturbation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spf/convex.hpp"
#include "spf/initialization.hpp"
#include "spf/spf.hpp"

namespace spf {

enum class Algorithm { Spf, Pf, BpLr, BpRs, BpRslr, BpDs, BpDslr };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
InitMethod parse_init_method(std::string_view name);

// Supports uniform over size-s subsets, nonzeros a normalized complex Gaussian
// vector, lambda = 1.
SparseRankOneModel random_sparse_rank_one(std::size_t n1, std::size_t n2, std::size_t s1, std::size_t s2,
                                          std::uint64_t seed);

struct SolverOptions {
  Algorithm algorithm = Algorithm::Spf;
  // Used by SPF and PF only.
  InitMethod init = InitMethod::Thresholding;
  std::size_t max_outer = 50;
  double rel_change_tol = 1e-8;
  HtpConfig htp;
  AdmmConfig admm;
  std::uint64_t support_budget = kDefaultSupportBudget;
};

struct RecoveryOutcome {
  CMatrix X_hat;
  std::size_t iterations = 0;
  std::string stop_reason;
  // Only for SPF/PF: the first run hit a zero factor and was restarted.
  bool restarted = false;
  RecoveryTrace trace;
};

// Runs init + solver. SPF/PF restart once from a perturbed v0 (relative size
// 1e-3, drawn from `seed`) when an update degenerates; a second degeneration
// propagates DegenerateIterate. `weights` is needed by the oracle BP variants.
RecoveryOutcome recover(const MeasurementOperator& A, const CVector& b, std::size_t s1, std::size_t s2,
                        const SolverOptions& opt, const OracleWeights& weights = {}, std::uint64_t seed = 0);

struct TrialResult {
  std::size_t trial = 0;
  double snr_db = 0.0;      // capped at 50
  double raw_snr_db = 0.0;  // uncapped
  // min{3, log10(err / (nu ||X||))}; NaN when nu = 0.
  double amplification = 0.0;
  double relative_residual = 0.0;  // ||b - A(X_hat)|| / ||b||
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
  std::string stop_reason;
};

// Noise is a complex Gaussian direction rescaled so that ||z|| = nu ||A(X)||.
// Degeneration after the restart is recorded as a failed trial.
TrialResult run_trial(const MeasurementOperator& A, const SparseRankOneModel& model, double nu,
                      const SolverOptions& opt, std::uint64_t seed);

// Draws operator and signal from the trial seed and runs the trial.
TrialResult run_seeded_trial(std::size_t n1, std::size_t n2, std::size_t s1, std::size_t s2, std::size_t m,
                             double nu, const SolverOptions& opt, std::uint64_t trial_seed);

enum class GridFamily {
  RowSparse,     // axis1 = s1, axis2 = n2, s2 = n2
  DoublySparse,  // axis1 = s1, axis2 = s2, n2 fixed
  Diagonal,      // axis1 = axis2 = s with s1 = s2 = s, n2 fixed
};

std::string to_string(GridFamily f);

struct ExperimentSpec {
  GridFamily family = GridFamily::RowSparse;
  std::size_t n1 = 128;
  std::vector<std::size_t> n2_values{4};
  std::vector<std::size_t> s1_values;
  std::vector<std::size_t> s2_values;
  std::vector<std::size_t> m_values;
  std::size_t trials = 100;
  SolverOptions solver;
  double nu = 0.0;
  double threshold_db = 50.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Cell {
  std::size_t axis1 = 0;
  std::size_t axis2 = 0;
  std::size_t m = 0;
  std::size_t n2 = 0;
  std::size_t s1 = 0;
  std::size_t s2 = 0;
};

std::vector<Cell> grid_cells(const ExperimentSpec& spec);
std::uint64_t cell_seed(std::uint64_t master, std::size_t axis1, std::size_t axis2, std::size_t m);

struct CellResult {
  Cell cell;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials); }
};

// Success: raw SNR >= threshold_db. Cells run in grid order; trials are spread
// over OpenMP threads and aggregated in index order.
std::vector<CellResult> phase_transition(const ExperimentSpec& spec);

// Columns axis1,axis2,m,trials,successes,rate.
void write_phase_csv(std::ostream& out, const std::vector<CellResult>& rows);

struct NoiseSweepSpec {
  std::size_t n1 = 256;
  std::size_t n2 = 64;
  std::size_t s1 = 32;
  // Unset: s2 = n2.
  std::optional<std::size_t> s2;
  std::vector<double> nu_values;
  // m = round(ratio * (s1 + s2)).
  std::vector<double> m_ratios;
  std::size_t trials = 100;
  SolverOptions solver;
  std::uint64_t seed = 1;

  std::size_t effective_s2() const { return s2.value_or(n2); }
  std::size_t m_for(double ratio) const;
  void validate() const;
};

struct NoiseCellResult {
  double nu = 0.0;
  double m_ratio = 0.0;
  std::size_t m = 0;
  double median_snr_db = 0.0;
  double median_amp = 0.0;
};

std::vector<NoiseCellResult> noise_sweep(const NoiseSweepSpec& spec);

// Columns nu,m_ratio,median_snr_db,median_amp.
void write_noise_csv(std::ostream& out, const std::vector<NoiseCellResult>& rows);

// JSON configs; unknown keys are rejected.
ExperimentSpec experiment_spec_from_json(std::string_view text);
NoiseSweepSpec noise_sweep_spec_from_json(std::string_view text);

double median(std::vector<double> values);

}  // namespace spf
