// Command-line front end: recovery from files, Monte-Carlo grids, theory
// constants and a blind-deconvolution demo.

#include <omp.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spf/experiment.hpp"
#include "spf/rng.hpp"
#include "spf/theory.hpp"

using nlohmann::ordered_json;

namespace {

// Like ordered_json::dump(2) but floats are written with %.17g; non-finite
// floats become null.
void dump(std::ostream& out, const ordered_json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out << ",\n";
      first = false;
      out << pad << ordered_json(key).dump() << ": ";
      dump(out, value, indent + 2);
    }
    out << '\n' << close << '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      out << "[]";
      return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out << ",\n";
      out << pad;
      dump(out, j[i], indent + 2);
    }
    out << '\n' << close << ']';
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    out << (std::isfinite(v) ? spf::format_double(v) : "null");
  } else {
    out << j.dump();
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spf::InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw spf::InvalidArgument("cannot write '" + path + "'");
  return file;
}

// "gaussian:m,n1,n2,seed" or a path to an operator file.
spf::MeasurementOperator load_operator_arg(const std::string& arg) {
  const std::string prefix = "gaussian:";
  if (arg.rfind(prefix, 0) != 0) return spf::load_operator(arg);
  std::vector<std::uint64_t> v;
  std::stringstream ss(arg.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw spf::InvalidArgument("bad gaussian operator field '" + item + "'");
    }
  }
  if (v.size() != 4) throw spf::InvalidArgument("expected gaussian:m,n1,n2,seed");
  spf::GaussianSpec gs;
  gs.m = static_cast<Eigen::Index>(v[0]);
  gs.n1 = static_cast<Eigen::Index>(v[1]);
  gs.n2 = static_cast<Eigen::Index>(v[2]);
  gs.seed = v[3];
  return spf::gaussian_operator(gs);
}

struct RecoverArgs {
  std::string op;
  std::string b;
  std::size_t s1 = 1;
  std::size_t s2 = 1;
  std::string init = "thresh";
  std::string algo = "spf";
  std::size_t max_outer = 50;
  std::uint64_t budget = spf::kDefaultSupportBudget;
  std::string out_matrix;
  std::string truth;
  std::string trace_csv;
  std::optional<double> w_row, w_col, w_nuc;
  std::uint64_t seed = 0;
};

int cmd_recover(const RecoverArgs& a) {
  const spf::MeasurementOperator A = load_operator_arg(a.op);
  const spf::CVector b = spf::load_vector(a.b);
  spf::SolverOptions opt;
  opt.algorithm = spf::parse_algorithm(a.algo);
  opt.init = spf::parse_init_method(a.init);
  opt.max_outer = a.max_outer;
  opt.support_budget = a.budget;

  std::optional<spf::CMatrix> X;
  spf::OracleWeights weights;
  if (!a.truth.empty()) {
    X = spf::load_matrix(a.truth);
    weights = spf::OracleWeights::from_matrix(*X);
  }
  if (a.w_row) weights.row_l12 = a.w_row;
  if (a.w_col) weights.col_l12 = a.w_col;
  if (a.w_nuc) weights.nuclear = a.w_nuc;

  const bool factorization = opt.algorithm == spf::Algorithm::Spf || opt.algorithm == spf::Algorithm::Pf;
  if (factorization && opt.init == spf::InitMethod::Optimal) {
    const auto count = spf::optimal_init_candidates(static_cast<std::size_t>(A.n1()), a.s1,
                                                    static_cast<std::size_t>(A.n2()), a.s2);
    std::cerr << "init optimal: " << count << " support pairs (budget " << a.budget << ")\n";
  }

  const spf::RecoveryOutcome rec = spf::recover(A, b, a.s1, a.s2, opt, weights, a.seed);
  ordered_json out;
  out["algorithm"] = a.algo;
  if (factorization) out["init"] = a.init;
  out["m"] = A.m();
  out["n1"] = A.n1();
  out["n2"] = A.n2();
  out["s1"] = a.s1;
  out["s2"] = a.s2;
  out["iterations"] = rec.iterations;
  out["stop_reason"] = rec.stop_reason;
  out["restarted"] = rec.restarted;
  out["relative_residual"] = (b - spf::apply(A, rec.X_hat)).norm() / b.norm();
  if (X) {
    out["snr_db"] = spf::reconstruction_snr(rec.X_hat, *X);
    out["raw_snr_db"] = spf::raw_snr(rec.X_hat, *X);
  }
  if (!rec.trace.rows.empty()) {
    ordered_json trace = ordered_json::array();
    for (const auto& r : rec.trace.rows) trace.push_back({{"t", r.t}, {"residual", r.residual}});
    out["trace"] = trace;
  }
  if (!a.trace_csv.empty()) {
    std::ofstream file;
    spf::write_trace_csv(open_output(a.trace_csv, file), rec.trace);
    out["trace_file"] = a.trace_csv;
  }
  if (!a.out_matrix.empty()) {
    spf::save_matrix(a.out_matrix, rec.X_hat);
    out["matrix_file"] = a.out_matrix;
  }
  dump(std::cout, out);
  std::cout << '\n';
  return 0;
}

int cmd_phase(const std::string& config, const std::string& out_path) {
  const spf::ExperimentSpec spec = spf::experiment_spec_from_json(read_text(config));
  const auto rows = spf::phase_transition(spec);
  std::ofstream file;
  spf::write_phase_csv(open_output(out_path, file), rows);
  return 0;
}

int cmd_noise(const std::string& config, const std::string& out_path) {
  const spf::NoiseSweepSpec spec = spf::noise_sweep_spec_from_json(read_text(config));
  const auto rows = spf::noise_sweep(spec);
  std::ofstream file;
  spf::write_noise_csv(open_output(out_path, file), rows);
  return 0;
}

struct TheoryArgs {
  double delta = 0.08;
  double nu = 0.08;
  std::optional<std::size_t> s1, s2, n1, n2;
  std::optional<double> D, sigma2;
  double c1 = 1.0;
};

int cmd_theory(const TheoryArgs& a) {
  namespace th = spf::theory;
  ordered_json out;
  out["delta"] = a.delta;
  out["nu"] = a.nu;
  const th::TheoryConstants c = th::htp_constants(a.delta);
  out["htp"] = {{"rho", c.rho}, {"tau", c.tau},         {"rho_prime", c.rho_prime}, {"tau_prime", c.tau_prime},
                {"L", c.L},     {"K", c.K},             {"C_htp", c.C_htp}};
  const th::OmegaBounds w = th::omega_bounds(a.delta, a.nu);
  out["omega"] = {{"feasible", w.feasible}};
  if (w.feasible) {
    out["omega"]["omega_inf"] = w.omega_inf;
    out["omega"]["omega_sup"] = w.omega_sup;
    out["omega"]["sin_omega_inf"] = std::sin(w.omega_inf);
    out["omega"]["sin_omega_sup"] = std::sin(w.omega_sup);
    try {
      const th::NoiseAmplification na = th::noise_amp_constant(a.delta, a.nu);
      out["noise_amplification"] = {
          {"sin_theta", na.sin_theta}, {"frobenius", na.frobenius}, {"fixed_point", na.fixed_point}};
    } catch (const spf::InvalidArgument&) {
      out["noise_amplification"] = nullptr;
    }
  }
  out["frobenius_factor"] = th::frobenius_factor(a.delta);
  if (a.s1 && a.s2) {
    out["dof_bound"] = th::dof_bound(*a.s1, *a.s2);
    if (a.D && a.sigma2) out["measurement_lower_bound"] = th::measurement_lower_bound(*a.s1, *a.s2, *a.D, *a.sigma2);
    if (a.n1 && a.n2)
      out["rip_sample_size"] = {{"c1", a.c1}, {"r", 1}, {"m", th::rip_sample_size(a.c1, 1, *a.s1, *a.s2, *a.n1, *a.n2)}};
    out["htp_iteration_budget_s1"] = th::htp_iteration_budget(*a.s1, a.delta);
    out["htp_iteration_budget_s2"] = th::htp_iteration_budget(*a.s2, a.delta);
  }
  if (a.n1 && a.D) out["rate_distortion_lower_n1"] = th::rate_distortion_lower(*a.n1, *a.D);
  dump(std::cout, out);
  std::cout << '\n';
  return 0;
}

struct LiftArgs {
  std::size_t n = 64;
  std::size_t s1 = 4;
  std::size_t s2 = 4;
  std::size_t m = 48;
  std::uint64_t seed = 1;
  std::string init = "thresh";
};

// x (s1-sparse) and y (s2-sparse) are convolved circularly and the n outputs
// are mixed by an m x n Gaussian matrix. In lifted form the unknown is x y^T,
// i.e. u = x, v = conj(y).
int cmd_lift_demo(const LiftArgs& a) {
  const auto n = static_cast<Eigen::Index>(a.n);
  const spf::MeasurementOperator conv = spf::lift_bilinear(spf::make_convolution_lifting(n));
  const spf::SparseRankOneModel model = spf::random_sparse_rank_one(a.n, a.n, a.s1, a.s2, spf::derive_seed(a.seed, 0));
  const spf::CVector x = model.u;
  const spf::CVector y = model.v.conjugate();

  spf::CounterRng rng(spf::derive_seed(a.seed, 1));
  spf::CMatrix Phi(static_cast<Eigen::Index>(a.m), n);
  for (Eigen::Index j = 0; j < n; ++j)
    Phi.col(j) = spf::complex_normal_vector(rng, a.m, 1.0 / static_cast<double>(a.m));

  // b = Phi c with c_k = trace(M_k^* X), so the mixed operator stacks Phi^H.
  const spf::MeasurementOperator A(n, n, conv.stacked() * Phi.adjoint(), a.seed);

  spf::CVector c = spf::CVector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) c[(j + k) % n] += x[j] * y[k];
  const spf::CVector b = Phi * c;
  const spf::CMatrix X = model.matrix();
  const double lift_error = (spf::apply(A, X) - b).norm() / b.norm();

  spf::SolverOptions opt;
  opt.init = spf::parse_init_method(a.init);
  const spf::RecoveryOutcome rec = spf::recover(A, b, a.s1, a.s2, opt, {}, a.seed);

  ordered_json out;
  out["n"] = a.n;
  out["s1"] = a.s1;
  out["s2"] = a.s2;
  out["m"] = a.m;
  out["seed"] = a.seed;
  out["lifting_relative_error"] = lift_error;
  out["iterations"] = rec.iterations;
  out["stop_reason"] = rec.stop_reason;
  out["relative_residual"] = (b - spf::apply(A, rec.X_hat)).norm() / b.norm();
  out["snr_db"] = spf::reconstruction_snr(rec.X_hat, X);
  // Circular convolution cannot tell (x, y) from (S^k x, S^-k y); report the
  // best match over shifts as well.
  double best = -std::numeric_limits<double>::infinity();
  Eigen::Index best_shift = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    spf::CVector xs(n), ys(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      xs[(j + k) % n] = x[j];
      ys[(j + n - k) % n] = y[j];
    }
    const double snr = spf::reconstruction_snr(rec.X_hat, xs * ys.transpose());
    if (snr > best) {
      best = snr;
      best_shift = k;
    }
  }
  out["snr_db_up_to_shift"] = best;
  out["shift"] = best_shift;
  dump(std::cout, out);
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse power factorization toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0: runtime default)")->check(CLI::NonNegativeNumber);

  RecoverArgs ra;
  auto* rec = app.add_subcommand("recover", "Recover a sparse rank-one matrix from measurements");
  rec->add_option("--operator", ra.op, "Operator file or gaussian:m,n1,n2,seed")->required();
  rec->add_option("--b", ra.b, "Measurement vector file")->required();
  rec->add_option("--s1", ra.s1, "Row sparsity")->required();
  rec->add_option("--s2", ra.s2, "Column sparsity")->required();
  rec->add_option("--init", ra.init, "Initialization")
      ->check(CLI::IsMember({"optimal", "thresh", "rowsparse-f", "rowsparse-s", "proxy"}));
  rec->add_option("--algo", ra.algo, "Solver")
      ->check(CLI::IsMember({"spf", "pf", "bp-lr", "bp-rs", "bp-rslr", "bp-ds", "bp-dslr"}));
  rec->add_option("--max-outer", ra.max_outer, "Outer iteration cap");
  rec->add_option("--budget", ra.budget, "Support-pair budget of the optimal init");
  rec->add_option("--out", ra.out_matrix, "Write the estimate to this matrix file");
  rec->add_option("--truth", ra.truth, "Ground-truth matrix file (SNR report and oracle BP weights)");
  rec->add_option("--trace", ra.trace_csv, "Write the iteration trace as CSV");
  rec->add_option("--w-row", ra.w_row, "Oracle weight ||X||_{1,2}");
  rec->add_option("--w-col", ra.w_col, "Oracle weight ||X^*||_{1,2}");
  rec->add_option("--w-nuc", ra.w_nuc, "Oracle weight ||X||_*");
  rec->add_option("--seed", ra.seed, "Seed of the restart perturbation");

  std::string config, out_path;
  auto* pt = app.add_subcommand("phase-transition", "Success-rate grid as CSV");
  pt->add_option("--config", config, "JSON experiment config")->required();
  pt->add_option("--out", out_path, "CSV path (default stdout)");
  auto* ns = app.add_subcommand("noise-sweep", "Median SNR / noise amplification grid as CSV");
  ns->add_option("--config", config, "JSON sweep config")->required();
  ns->add_option("--out", out_path, "CSV path (default stdout)");

  TheoryArgs ta;
  auto* th = app.add_subcommand("theory", "Closed-form constants and bounds as JSON");
  th->add_option("--delta", ta.delta, "RIP constant")->required();
  th->add_option("--nu", ta.nu, "Noise level")->required();
  th->add_option("--s1", ta.s1, "Row sparsity");
  th->add_option("--s2", ta.s2, "Column sparsity");
  th->add_option("--n1", ta.n1, "Rows");
  th->add_option("--n2", ta.n2, "Columns");
  th->add_option("--D", ta.D, "Distortion");
  th->add_option("--sigma2", ta.sigma2, "Noise variance");
  th->add_option("--c1", ta.c1, "Constant of the RIP sample size");

  LiftArgs la;
  auto* lift = app.add_subcommand("lift-demo", "Blind deconvolution round trip through lifting");
  lift->add_option("--n", la.n, "Signal length")->required();
  lift->add_option("--s1", la.s1, "Sparsity of x")->required();
  lift->add_option("--s2", la.s2, "Sparsity of y")->required();
  lift->add_option("--m", la.m, "Number of mixed measurements")->required();
  lift->add_option("--seed", la.seed, "Master seed");
  lift->add_option("--init", la.init, "Initialization")->check(CLI::IsMember({"optimal", "thresh", "rowsparse-f", "rowsparse-s", "proxy"}));

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*rec) return cmd_recover(ra);
    if (*pt) return cmd_phase(config, out_path);
    if (*ns) return cmd_noise(config, out_path);
    if (*th) return cmd_theory(ta);
    if (*lift) return cmd_lift_demo(la);
  } catch (const spf::CombinatorialBudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
