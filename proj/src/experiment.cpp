#include "spf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "spf/rng.hpp"

namespace spf {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Spf: return "spf";
    case Algorithm::Pf: return "pf";
    case Algorithm::BpLr: return "bp-lr";
    case Algorithm::BpRs: return "bp-rs";
    case Algorithm::BpRslr: return "bp-rslr";
    case Algorithm::BpDs: return "bp-ds";
    case Algorithm::BpDslr: return "bp-dslr";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::Spf, Algorithm::Pf, Algorithm::BpLr, Algorithm::BpRs, Algorithm::BpRslr,
                      Algorithm::BpDs, Algorithm::BpDslr})
    if (to_string(a) == name) return a;
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

InitMethod parse_init_method(std::string_view name) {
  for (InitMethod m : {InitMethod::Optimal, InitMethod::Thresholding, InitMethod::RowSparseSpectral,
                       InitMethod::RowSparseFrobenius, InitMethod::PfProxy})
    if (to_string(m) == name) return m;
  throw InvalidArgument("unknown init method '" + std::string(name) + "'");
}

std::string to_string(GridFamily f) {
  switch (f) {
    case GridFamily::RowSparse: return "row-sparse";
    case GridFamily::DoublySparse: return "doubly-sparse";
    case GridFamily::Diagonal: return "diagonal";
  }
  return "unknown";
}

namespace {

CVector sphere_on_support(CounterRng& rng, std::size_t n, std::size_t s) {
  const IndexSet J = random_subset(rng, n, s);
  CVector g = complex_normal_vector(rng, s);
  while (!(g.norm() > 0.0)) g = complex_normal_vector(rng, s);
  g /= g.norm();
  CVector x = CVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < s; ++k) x[static_cast<Eigen::Index>(J[k])] = g[static_cast<Eigen::Index>(k)];
  return x;
}

BpVariant bp_variant(Algorithm a) {
  switch (a) {
    case Algorithm::BpLr: return BpVariant::LR;
    case Algorithm::BpRs: return BpVariant::RS;
    case Algorithm::BpRslr: return BpVariant::RSLR;
    case Algorithm::BpDs: return BpVariant::DS;
    case Algorithm::BpDslr: return BpVariant::DSLR;
    default: break;
  }
  throw InvalidArgument("bp_variant: not a convex algorithm");
}

InitResult run_init(const MeasurementOperator& A, const CVector& b, std::size_t s1, std::size_t s2,
                    const SolverOptions& opt) {
  switch (opt.init) {
    case InitMethod::Optimal: return init_optimal(A, b, s1, s2, opt.support_budget);
    case InitMethod::Thresholding: return init_thresholding(A, b, s1, s2);
    case InitMethod::RowSparseSpectral: return init_rowsparse(A, b, s1, RowNorm::Spectral, opt.support_budget);
    case InitMethod::RowSparseFrobenius: return init_rowsparse(A, b, s1, RowNorm::Frobenius, opt.support_budget);
    case InitMethod::PfProxy: return init_pf_proxy(A, b);
  }
  throw InvalidArgument("run_init: unknown init method");
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SparseRankOneModel random_sparse_rank_one(std::size_t n1, std::size_t n2, std::size_t s1, std::size_t s2,
                                          std::uint64_t seed) {
  if (s1 < 1 || s1 > n1 || s2 < 1 || s2 > n2)
    throw InvalidArgument("random_sparse_rank_one: sparsities must satisfy 1 <= s1 <= n1, 1 <= s2 <= n2");
  SparseRankOneModel model;
  model.s1 = s1;
  model.s2 = s2;
  CounterRng ru(derive_seed(seed, 0));
  CounterRng rv(derive_seed(seed, 1));
  model.u = sphere_on_support(ru, n1, s1);
  model.v = sphere_on_support(rv, n2, s2);
  return model;
}

RecoveryOutcome recover(const MeasurementOperator& A, const CVector& b, std::size_t s1, std::size_t s2,
                        const SolverOptions& opt, const OracleWeights& weights, std::uint64_t seed) {
  RecoveryOutcome out;
  if (opt.algorithm != Algorithm::Spf && opt.algorithm != Algorithm::Pf) {
    BpProblem problem{&A, b, weights};
    BpResult r = bp_solve(problem, bp_variant(opt.algorithm), opt.admm);
    out.X_hat = std::move(r.Z);
    out.iterations = r.iterations;
    out.stop_reason = r.converged ? "converged" : "max_iters";
    return out;
  }

  SpfConfig cfg;
  cfg.s1 = s1;
  cfg.s2 = s2;
  cfg.max_outer = opt.max_outer;
  cfg.rel_change_tol = opt.rel_change_tol;
  cfg.htp = opt.htp;
  const bool pf = opt.algorithm == Algorithm::Pf;
  const CVector v0 = run_init(A, b, s1, s2, opt).v0;
  const auto run = [&](const CVector& start) { return pf ? pf_run(A, b, cfg, start) : spf_run(A, b, cfg, start); };

  SpfResult r;
  try {
    r = run(v0);
  } catch (const DegenerateIterate&) {
    CounterRng rng(derive_seed(seed, 4));
    CVector d = complex_normal_vector(rng, static_cast<std::size_t>(v0.size()));
    CVector start = v0 + 1e-3 * v0.norm() / d.norm() * d;
    r = run(start);
    out.restarted = true;
  }
  out.X_hat = std::move(r.X_hat);
  out.iterations = r.trace.rows.size();
  out.stop_reason = to_string(r.trace.stop);
  out.trace = std::move(r.trace);
  return out;
}

TrialResult run_trial(const MeasurementOperator& A, const SparseRankOneModel& model, double nu,
                      const SolverOptions& opt, std::uint64_t seed) {
  if (model.u.size() != A.n1() || model.v.size() != A.n2())
    throw InvalidArgument("run_trial: model dimensions do not match operator");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw InvalidArgument("run_trial: nu must be finite and >= 0");

  const auto t0 = std::chrono::steady_clock::now();
  const CMatrix X = model.matrix();
  CVector b = spf::apply(A, X);
  if (nu > 0.0) {
    CounterRng rng(derive_seed(seed, 3));
    CVector z = complex_normal_vector(rng, static_cast<std::size_t>(A.m()));
    b += (nu * b.norm() / z.norm()) * z;
  }

  TrialResult res;
  try {
    const RecoveryOutcome rec = recover(A, b, model.s1, model.s2, opt, OracleWeights::from_matrix(X), seed);
    res.raw_snr_db = raw_snr(rec.X_hat, X);
    res.snr_db = std::min(50.0, res.raw_snr_db);
    res.amplification =
        nu > 0.0 ? noise_amplification(rec.X_hat, X, nu) : std::numeric_limits<double>::quiet_NaN();
    res.relative_residual = (b - spf::apply(A, rec.X_hat)).norm() / b.norm();
    res.iterations = rec.iterations;
    res.stop_reason = rec.stop_reason;
  } catch (const DegenerateIterate& e) {
    // Zero estimate: SNR 0 dB, error ||X||.
    res.raw_snr_db = 0.0;
    res.snr_db = 0.0;
    res.amplification = nu > 0.0 ? std::min(3.0, std::log10(1.0 / nu)) : std::numeric_limits<double>::quiet_NaN();
    res.relative_residual = 1.0;
    res.iterations = e.trace().rows.size();
    res.stop_reason = to_string(StopReason::Degenerate);
  }
  res.wall_seconds = elapsed_since(t0);
  return res;
}

TrialResult run_seeded_trial(std::size_t n1, std::size_t n2, std::size_t s1, std::size_t s2, std::size_t m,
                             double nu, const SolverOptions& opt, std::uint64_t trial_seed) {
  GaussianSpec gs;
  gs.m = static_cast<Eigen::Index>(m);
  gs.n1 = static_cast<Eigen::Index>(n1);
  gs.n2 = static_cast<Eigen::Index>(n2);
  gs.seed = derive_seed(trial_seed, 1);
  const MeasurementOperator A = gaussian_operator(gs);
  const SparseRankOneModel model = random_sparse_rank_one(n1, n2, s1, s2, derive_seed(trial_seed, 2));
  return run_trial(A, model, nu, opt, trial_seed);
}

void ExperimentSpec::validate() const {
  if (n1 < 1) throw InvalidArgument("experiment: n1 must be positive");
  if (n2_values.empty() || s1_values.empty() || m_values.empty())
    throw InvalidArgument("experiment: n2, s1 and m lists must be non-empty");
  if (family == GridFamily::DoublySparse && s2_values.empty())
    throw InvalidArgument("experiment: doubly-sparse grid needs s2 values");
  if (family != GridFamily::RowSparse && n2_values.size() != 1)
    throw InvalidArgument("experiment: doubly-sparse grids take a single n2");
  if (trials < 1) throw InvalidArgument("experiment: trials must be positive");
  if (!(threshold_db > 0.0)) throw InvalidArgument("experiment: threshold must be positive");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw InvalidArgument("experiment: nu must be finite and >= 0");
  for (std::size_t m : m_values)
    if (m < 1) throw InvalidArgument("experiment: m must be positive");
  for (const Cell& c : grid_cells(*this))
    if (c.s1 < 1 || c.s1 > n1 || c.s2 < 1 || c.s2 > c.n2)
      throw InvalidArgument("experiment: cell (" + std::to_string(c.axis1) + ", " + std::to_string(c.axis2) +
                            ") has sparsity outside the matrix shape");
}

std::vector<Cell> grid_cells(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  switch (spec.family) {
    case GridFamily::RowSparse:
      for (std::size_t n2 : spec.n2_values)
        for (std::size_t s : spec.s1_values)
          for (std::size_t m : spec.m_values) cells.push_back({s, n2, m, n2, s, n2});
      break;
    case GridFamily::DoublySparse:
      for (std::size_t s2 : spec.s2_values)
        for (std::size_t s1 : spec.s1_values)
          for (std::size_t m : spec.m_values) cells.push_back({s1, s2, m, spec.n2_values.front(), s1, s2});
      break;
    case GridFamily::Diagonal:
      for (std::size_t s : spec.s1_values)
        for (std::size_t m : spec.m_values) cells.push_back({s, s, m, spec.n2_values.front(), s, s});
      break;
  }
  return cells;
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t axis1, std::size_t axis2, std::size_t m) {
  return derive_seed(derive_seed(derive_seed(master, axis1), axis2), m);
}

std::vector<CellResult> phase_transition(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<Cell> cells = grid_cells(spec);
  const std::size_t T = spec.trials;
  const std::int64_t total = static_cast<std::int64_t>(cells.size() * T);
  std::vector<char> success(static_cast<std::size_t>(total), 0);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < total; ++k) {
    const Cell& c = cells[static_cast<std::size_t>(k) / T];
    const std::size_t trial = static_cast<std::size_t>(k) % T;
    const std::uint64_t seed = derive_seed(cell_seed(spec.seed, c.axis1, c.axis2, c.m), trial);
    const TrialResult r = run_seeded_trial(spec.n1, c.n2, c.s1, c.s2, c.m, spec.nu, spec.solver, seed);
    success[static_cast<std::size_t>(k)] = r.raw_snr_db >= spec.threshold_db;
  }

  std::vector<CellResult> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CellResult cr{cells[i], T, 0};
    for (std::size_t t = 0; t < T; ++t) cr.successes += success[i * T + t] ? 1 : 0;
    out.push_back(cr);
  }
  return out;
}

void write_phase_csv(std::ostream& out, const std::vector<CellResult>& rows) {
  out << "axis1,axis2,m,trials,successes,rate\n";
  for (const CellResult& r : rows)
    out << r.cell.axis1 << ',' << r.cell.axis2 << ',' << r.cell.m << ',' << r.trials << ',' << r.successes << ','
        << format_double(r.rate()) << '\n';
}

std::size_t NoiseSweepSpec::m_for(double ratio) const {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(s1 + effective_s2())));
}

void NoiseSweepSpec::validate() const {
  if (s1 < 1 || s1 > n1 || effective_s2() < 1 || effective_s2() > n2)
    throw InvalidArgument("noise sweep: sparsities must satisfy 1 <= s1 <= n1, 1 <= s2 <= n2");
  if (nu_values.empty() || m_ratios.empty()) throw InvalidArgument("noise sweep: nu and m_ratio lists must be non-empty");
  for (double nu : nu_values)
    if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("noise sweep: nu values must be positive");
  for (double r : m_ratios)
    if (!(r > 0.0) || m_for(r) < 1) throw InvalidArgument("noise sweep: m_ratio must give m >= 1");
  if (trials < 1) throw InvalidArgument("noise sweep: trials must be positive");
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<NoiseCellResult> noise_sweep(const NoiseSweepSpec& spec) {
  spec.validate();
  struct Coord {
    double nu;
    double ratio;
    std::size_t m;
  };
  std::vector<Coord> cells;
  for (double ratio : spec.m_ratios)
    for (double nu : spec.nu_values) cells.push_back({nu, ratio, spec.m_for(ratio)});

  const std::size_t T = spec.trials;
  const std::int64_t total = static_cast<std::int64_t>(cells.size() * T);
  std::vector<double> snr(static_cast<std::size_t>(total)), amp(static_cast<std::size_t>(total));
  const std::size_t s2 = spec.effective_s2();

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < total; ++k) {
    const Coord& c = cells[static_cast<std::size_t>(k) / T];
    const std::size_t trial = static_cast<std::size_t>(k) % T;
    // Instances depend on (m, trial) only: every nu column sees the same
    // operator, signal and noise direction.
    const std::uint64_t seed = derive_seed(derive_seed(spec.seed, c.m), trial);
    GaussianSpec gs;
    gs.m = static_cast<Eigen::Index>(c.m);
    gs.n1 = static_cast<Eigen::Index>(spec.n1);
    gs.n2 = static_cast<Eigen::Index>(spec.n2);
    gs.seed = derive_seed(seed, 1);
    const MeasurementOperator A = gaussian_operator(gs);
    const SparseRankOneModel model = random_sparse_rank_one(spec.n1, spec.n2, spec.s1, s2, derive_seed(seed, 2));
    const TrialResult r = run_trial(A, model, c.nu, spec.solver, seed);
    snr[static_cast<std::size_t>(k)] = r.snr_db;
    amp[static_cast<std::size_t>(k)] = r.amplification;
  }

  std::vector<NoiseCellResult> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto first = static_cast<std::ptrdiff_t>(i * T);
    const auto last = static_cast<std::ptrdiff_t>((i + 1) * T);
    out.push_back({cells[i].nu, cells[i].ratio, cells[i].m,
                   median(std::vector<double>(snr.begin() + first, snr.begin() + last)),
                   median(std::vector<double>(amp.begin() + first, amp.begin() + last))});
  }
  return out;
}

void write_noise_csv(std::ostream& out, const std::vector<NoiseCellResult>& rows) {
  out << "nu,m_ratio,median_snr_db,median_amp\n";
  for (const NoiseCellResult& r : rows)
    out << format_double(r.nu) << ',' << format_double(r.m_ratio) << ',' << format_double(r.median_snr_db) << ','
        << format_double(r.median_amp) << '\n';
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + ": config must be a JSON object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw InvalidArgument(std::string(what) + ": unknown key '" + key + "'");
}

std::size_t as_count(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw InvalidArgument(std::string("config: '") + key + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

double as_real(const json& j, const char* key) {
  if (!j.is_number()) throw InvalidArgument(std::string("config: '") + key + "' must be a number");
  return j.get<double>();
}

// A number, an array of numbers, or {"from", "to", "step"} (inclusive).
std::vector<std::size_t> as_count_list(const json& j, const char* key) {
  std::vector<std::size_t> out;
  if (j.is_array()) {
    for (const json& e : j) out.push_back(as_count(e, key));
  } else if (j.is_object()) {
    reject_unknown(j, {"from", "to", "step"}, key);
    const std::size_t from = as_count(j.at("from"), key);
    const std::size_t to = as_count(j.at("to"), key);
    const std::size_t step = j.contains("step") ? as_count(j.at("step"), key) : 1;
    if (step < 1) throw InvalidArgument(std::string("config: '") + key + "' step must be positive");
    for (std::size_t v = from; v <= to; v += step) out.push_back(v);
  } else {
    out.push_back(as_count(j, key));
  }
  return out;
}

std::vector<double> as_real_list(const json& j, const char* key) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const json& e : j) out.push_back(as_real(e, key));
  } else {
    out.push_back(as_real(j, key));
  }
  return out;
}

void read_solver(const json& j, SolverOptions& s) {
  if (j.contains("algorithm")) s.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  if (j.contains("init")) s.init = parse_init_method(j.at("init").get<std::string>());
  if (j.contains("max_outer")) s.max_outer = as_count(j.at("max_outer"), "max_outer");
  if (j.contains("rel_change_tol")) s.rel_change_tol = as_real(j.at("rel_change_tol"), "rel_change_tol");
  if (j.contains("support_budget")) s.support_budget = as_count(j.at("support_budget"), "support_budget");
  if (j.contains("admm")) {
    const json& a = j.at("admm");
    reject_unknown(a, {"penalty", "max_iters", "primal_tol", "dual_tol"}, "admm");
    if (a.contains("penalty")) s.admm.penalty = as_real(a.at("penalty"), "penalty");
    if (a.contains("max_iters")) s.admm.max_iters = as_count(a.at("max_iters"), "max_iters");
    if (a.contains("primal_tol")) s.admm.primal_tol = as_real(a.at("primal_tol"), "primal_tol");
    if (a.contains("dual_tol")) s.admm.dual_tol = as_real(a.at("dual_tol"), "dual_tol");
  }
}

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

}  // namespace

ExperimentSpec experiment_spec_from_json(std::string_view text) {
  const json j = parse(text);
  reject_unknown(j,
                 {"family", "n1", "n2", "s1", "s2", "m", "trials", "algorithm", "init", "max_outer",
                  "rel_change_tol", "support_budget", "admm", "nu", "threshold_db", "seed"},
                 "phase-transition");
  ExperimentSpec spec;
  try {
    if (j.contains("family")) {
      const auto f = j.at("family").get<std::string>();
      if (f == "row-sparse") spec.family = GridFamily::RowSparse;
      else if (f == "doubly-sparse") spec.family = GridFamily::DoublySparse;
      else if (f == "diagonal") spec.family = GridFamily::Diagonal;
      else throw InvalidArgument("config: unknown family '" + f + "'");
    }
    if (j.contains("n1")) spec.n1 = as_count(j.at("n1"), "n1");
    if (j.contains("n2")) spec.n2_values = as_count_list(j.at("n2"), "n2");
    if (j.contains("s1")) spec.s1_values = as_count_list(j.at("s1"), "s1");
    if (j.contains("s2")) spec.s2_values = as_count_list(j.at("s2"), "s2");
    if (j.contains("m")) spec.m_values = as_count_list(j.at("m"), "m");
    if (j.contains("trials")) spec.trials = as_count(j.at("trials"), "trials");
    if (j.contains("nu")) spec.nu = as_real(j.at("nu"), "nu");
    if (j.contains("threshold_db")) spec.threshold_db = as_real(j.at("threshold_db"), "threshold_db");
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    read_solver(j, spec.solver);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  spec.validate();
  return spec;
}

NoiseSweepSpec noise_sweep_spec_from_json(std::string_view text) {
  const json j = parse(text);
  reject_unknown(j,
                 {"n1", "n2", "s1", "s2", "nu", "m_ratio", "trials", "algorithm", "init", "max_outer",
                  "rel_change_tol", "support_budget", "admm", "seed"},
                 "noise-sweep");
  NoiseSweepSpec spec;
  try {
    if (j.contains("n1")) spec.n1 = as_count(j.at("n1"), "n1");
    if (j.contains("n2")) spec.n2 = as_count(j.at("n2"), "n2");
    if (j.contains("s1")) spec.s1 = as_count(j.at("s1"), "s1");
    if (j.contains("s2")) spec.s2 = as_count(j.at("s2"), "s2");
    if (j.contains("nu")) spec.nu_values = as_real_list(j.at("nu"), "nu");
    if (j.contains("m_ratio")) spec.m_ratios = as_real_list(j.at("m_ratio"), "m_ratio");
    if (j.contains("trials")) spec.trials = as_count(j.at("trials"), "trials");
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    read_solver(j, spec.solver);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace spf
