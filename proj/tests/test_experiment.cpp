#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <omp.h>

#include "spf/experiment.hpp"
#include "test_util.hpp"

using namespace spf;
using spf::testing::gaussian;
using spf::testing::rel_err;

TEST(Model, InvariantsOverManyDraws) {
  const std::size_t n1 = 20, n2 = 9, s1 = 4, s2 = 3, draws = 10000;
  std::vector<int> hits(n1, 0);
  for (std::uint64_t d = 0; d < draws; ++d) {
    const SparseRankOneModel X = random_sparse_rank_one(n1, n2, s1, s2, derive_seed(17, d));
    ASSERT_NEAR(X.u.norm(), 1.0, 1e-12);
    ASSERT_NEAR(X.v.norm(), 1.0, 1e-12);
    ASSERT_EQ(nnz(X.u), s1);
    ASSERT_EQ(nnz(X.v), s2);
    ASSERT_EQ(X.lambda, 1.0);
    for (std::size_t j : support(X.u)) ++hits[j];
  }
  const double p = static_cast<double>(s1) / n1;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int h : hits) EXPECT_NEAR(h, draws * p, 3 * sigma);
}

TEST(Model, FullSupportAndErrors) {
  const SparseRankOneModel X = random_sparse_rank_one(8, 3, 8, 3, 1);
  EXPECT_EQ(support(X.u), IndexSet::full(8));
  EXPECT_THROW(random_sparse_rank_one(8, 3, 0, 3, 1), InvalidArgument);
  EXPECT_THROW(random_sparse_rank_one(8, 3, 2, 4, 1), InvalidArgument);
}

TEST(Parse, NamesRoundTrip) {
  for (Algorithm a : {Algorithm::Spf, Algorithm::Pf, Algorithm::BpLr, Algorithm::BpRs, Algorithm::BpRslr,
                      Algorithm::BpDs, Algorithm::BpDslr})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  for (InitMethod m : {InitMethod::Optimal, InitMethod::Thresholding, InitMethod::RowSparseSpectral,
                       InitMethod::RowSparseFrobenius, InitMethod::PfProxy})
    EXPECT_EQ(parse_init_method(to_string(m)), m);
  EXPECT_THROW(parse_algorithm("cosamp"), InvalidArgument);
  EXPECT_THROW(parse_init_method("random"), InvalidArgument);
}

TEST(Trial, NoiselessFullMeasurementHitsCap) {
  const SparseRankOneModel X = random_sparse_rank_one(6, 4, 2, 2, 3);
  const MeasurementOperator A = vectorization_operator(6, 4);
  for (Algorithm a : {Algorithm::Spf, Algorithm::Pf, Algorithm::BpLr}) {
    SolverOptions opt;
    opt.algorithm = a;
    const TrialResult r = run_trial(A, X, 0.0, opt, 9);
    EXPECT_EQ(r.snr_db, 50.0) << to_string(a);
    EXPECT_TRUE(std::isnan(r.amplification));
    EXPECT_LE(r.relative_residual, 1e-6);
  }
}

TEST(Trial, RowSparseThresholdingInit) {
  const SparseRankOneModel X = random_sparse_rank_one(128, 8, 16, 8, 4);
  const MeasurementOperator A = gaussian(96, 128, 8, 5);
  const TrialResult r = run_trial(A, X, 0.0, SolverOptions{}, 6);
  EXPECT_GE(r.raw_snr_db, 50.0);
  EXPECT_LE(r.relative_residual, 1e-6);
}

TEST(Trial, Deterministic) {
  SolverOptions opt;
  const TrialResult a = run_seeded_trial(40, 6, 5, 3, 36, 0.1, opt, 123);
  const TrialResult b = run_seeded_trial(40, 6, 5, 3, 36, 0.1, opt, 123);
  EXPECT_EQ(a.snr_db, b.snr_db);
  EXPECT_EQ(a.raw_snr_db, b.raw_snr_db);
  EXPECT_EQ(a.amplification, b.amplification);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.stop_reason, b.stop_reason);
  const TrialResult c = run_seeded_trial(40, 6, 5, 3, 36, 0.1, opt, 124);
  EXPECT_NE(a.raw_snr_db, c.raw_snr_db);
}

TEST(Trial, NoiseLevelIsExact) {
  // With PF on a vectorization operator the recovery error is the best rank-one
  // fit of X + Z, so it is at most ||Z|| = nu ||X||.
  const SparseRankOneModel X = random_sparse_rank_one(6, 5, 6, 5, 7);
  const MeasurementOperator A = vectorization_operator(6, 5);
  SolverOptions opt;
  opt.algorithm = Algorithm::Pf;
  opt.init = InitMethod::PfProxy;
  const TrialResult r = run_trial(A, X, 0.2, opt, 8);
  EXPECT_LE(r.amplification, 1e-9);
  EXPECT_GE(r.raw_snr_db, 20.0 * std::log10(1 / 0.2) - 1e-9);
  EXPECT_THROW(run_trial(A, X, -0.1, opt, 8), InvalidArgument);
}

TEST(Grid, CellsAndSeeds) {
  ExperimentSpec spec;
  spec.family = GridFamily::RowSparse;
  spec.n1 = 16;
  spec.n2_values = {2, 4};
  spec.s1_values = {1, 3};
  spec.m_values = {10, 20, 30};
  const std::vector<Cell> cells = grid_cells(spec);
  ASSERT_EQ(cells.size(), 12u);
  EXPECT_EQ(cells[0].s2, cells[0].n2);
  EXPECT_EQ(cell_seed(1, 3, 4, 20), derive_seed(derive_seed(derive_seed(1, 3), 4), 20));

  spec.family = GridFamily::Diagonal;
  spec.n2_values = {16};
  spec.s1_values = {2, 4, 6};
  EXPECT_EQ(grid_cells(spec).size(), 9u);
  for (const Cell& c : grid_cells(spec)) EXPECT_EQ(c.s1, c.s2);

  spec.family = GridFamily::DoublySparse;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec.s2_values = {1, 2};
  EXPECT_EQ(grid_cells(spec).size(), 18u);
  spec.s1_values = {20};
  EXPECT_THROW(spec.validate(), InvalidArgument);
}

TEST(PhaseTransition, FullMeasurementCellAlwaysSucceeds) {
  ExperimentSpec spec;
  spec.n1 = 8;
  spec.n2_values = {3};
  spec.s1_values = {2};
  spec.m_values = {24};
  spec.trials = 10;
  const auto rows = phase_transition(spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].rate(), 1.0);
}

TEST(PhaseTransition, CsvSchema) {
  std::vector<CellResult> rows(1);
  rows[0].cell = {3, 4, 48, 4, 3, 4};
  rows[0].trials = 8;
  rows[0].successes = 6;
  std::ostringstream os;
  write_phase_csv(os, rows);
  EXPECT_EQ(os.str(), "axis1,axis2,m,trials,successes,rate\n3,4,48,8,6,0.75\n");
}

TEST(PhaseTransition, ThreadCountInvariant) {
  ExperimentSpec spec = experiment_spec_from_json(R"({"n1": 24, "n2": [2, 4], "s1": [2, 5], "m": [20, 40],
                                                       "trials": 6, "seed": 99})");
  std::string out[2];
  const int counts[2] = {1, 8};
  const int saved = omp_get_max_threads();
  for (int i = 0; i < 2; ++i) {
    omp_set_num_threads(counts[i]);
    std::ostringstream os;
    write_phase_csv(os, phase_transition(spec));
    out[i] = os.str();
  }
  omp_set_num_threads(saved);
  EXPECT_EQ(out[0], out[1]);
}

TEST(PhaseTransition, MonotoneInM) {
  ExperimentSpec spec = experiment_spec_from_json(R"({"n1": 32, "n2": [4], "s1": [3, 6],
                                                       "m": [8, 16, 24, 32, 48], "trials": 20, "seed": 5})");
  const auto rows = phase_transition(spec);
  // rows are ordered (axis1, axis2, m) with m fastest
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].cell.axis1 != rows[i - 1].cell.axis1) continue;
    EXPECT_GE(rows[i].rate(), rows[i - 1].rate() - 0.05) << "s=" << rows[i].cell.axis1 << " m=" << rows[i].cell.m;
  }
}

TEST(NoiseSweep, CsvSchemaAndDeterminism) {
  NoiseSweepSpec spec = noise_sweep_spec_from_json(R"({"n1": 24, "n2": 4, "s1": 3, "nu": [0.05, 0.3],
                                                        "m_ratio": [4], "trials": 5, "seed": 3})");
  EXPECT_EQ(spec.m_for(4), 28u);
  const auto a = noise_sweep(spec);
  const auto b = noise_sweep(spec);
  ASSERT_EQ(a.size(), 2u);
  std::ostringstream oa, ob;
  write_noise_csv(oa, a);
  write_noise_csv(ob, b);
  EXPECT_EQ(oa.str(), ob.str());
  EXPECT_EQ(oa.str().substr(0, oa.str().find('\n')), "nu,m_ratio,median_snr_db,median_amp");
  EXPECT_EQ(a[0].nu, 0.05);
  EXPECT_LE(a[0].median_snr_db, 50.0);
  EXPECT_LE(a[0].median_amp, 3.0);
  // Larger noise, lower SNR on the same instances.
  EXPECT_GT(a[0].median_snr_db, a[1].median_snr_db);
}

TEST(NoiseSweep, CsvFormat) {
  std::vector<NoiseCellResult> rows{{0.1, 3.0, 288, 25.5, -0.25}};
  std::ostringstream os;
  write_noise_csv(os, rows);
  EXPECT_EQ(os.str(), "nu,m_ratio,median_snr_db,median_amp\n0.10000000000000001,3,25.5,-0.25\n");
}

TEST(Config, DefaultsAndRanges) {
  const ExperimentSpec s = experiment_spec_from_json(
      R"({"family": "doubly-sparse", "n1": 64, "n2": 64, "s1": {"from": 4, "to": 12, "step": 4},
          "s2": [4, 8], "m": 96, "algorithm": "bp-rs", "admm": {"penalty": 2.0}})");
  EXPECT_EQ(s.family, GridFamily::DoublySparse);
  EXPECT_EQ(s.s1_values, (std::vector<std::size_t>{4, 8, 12}));
  EXPECT_EQ(s.m_values, (std::vector<std::size_t>{96}));
  EXPECT_EQ(s.trials, 100u);
  EXPECT_EQ(s.threshold_db, 50.0);
  EXPECT_EQ(s.solver.algorithm, Algorithm::BpRs);
  EXPECT_EQ(s.solver.admm.penalty, 2.0);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(experiment_spec_from_json(R"({"n1": 8, "n2": 2, "s1": 1, "m": 4, "colour": 1})"), InvalidArgument);
  EXPECT_THROW(experiment_spec_from_json(R"({"n1": 8, "n2": 2, "s1": 1, "m": 4, "admm": {"rho": 1}})"),
               InvalidArgument);
  EXPECT_THROW(experiment_spec_from_json(R"({"n1": 8, "n2": 2, "s1": 1, "m": -4})"), InvalidArgument);
  EXPECT_THROW(experiment_spec_from_json(R"({"n1": 8, "n2": 2, "s1": 1, "m": 4, "family": "blocky"})"),
               InvalidArgument);
  EXPECT_THROW(experiment_spec_from_json("{not json"), InvalidArgument);
  EXPECT_THROW(noise_sweep_spec_from_json(R"({"nu": [0.0], "m_ratio": [3]})"), InvalidArgument);
  EXPECT_THROW(noise_sweep_spec_from_json(R"({"nu": [0.1], "m_ratio": [3], "extra": true})"), InvalidArgument);
}

TEST(Median, OddEvenAndEmpty) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(median({}), InvalidArgument);
}
