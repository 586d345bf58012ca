#include "spf/convex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace spf {

std::string to_string(BpVariant v) {
  switch (v) {
    case BpVariant::LR: return "bp-lr";
    case BpVariant::RS: return "bp-rs";
    case BpVariant::RSLR: return "bp-rslr";
    case BpVariant::DS: return "bp-ds";
    case BpVariant::DSLR: return "bp-dslr";
  }
  return "unknown";
}

double nuclear_norm(const CMatrix& Z) {
  if (Z.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(Z);
  return svd.singularValues().sum();
}

double row_l12_norm(const CMatrix& Z) { return Z.rowwise().norm().sum(); }

double col_l12_norm(const CMatrix& Z) { return Z.colwise().norm().sum(); }

OracleWeights OracleWeights::from_matrix(const CMatrix& X) {
  return {row_l12_norm(X), col_l12_norm(X), nuclear_norm(X)};
}

namespace {

void check_threshold(double t, const char* what) {
  if (!(t >= 0.0)) throw InvalidArgument(std::string(what) + ": threshold must be >= 0");
}

struct Svd {
  CMatrix U;
  RVector s;
  CMatrix V;
};

Svd thin_svd(const CMatrix& Z) {
  Eigen::BDCSVD<CMatrix> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

CMatrix from_svd(const Svd& d, const RVector& s) {
  return d.U * s.cast<Complex>().asDiagonal() * d.V.adjoint();
}

// Scale each row so that its norm becomes target[i].
CMatrix rescale_rows(const CMatrix& Z, const RVector& norms, const RVector& target) {
  CMatrix out = Z;
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    out.row(i) *= norms[i] > 0.0 ? target[i] / norms[i] : 0.0;
  return out;
}

// Level theta with sum max(a_i - theta, 0) = r, for a >= 0 and r < sum(a).
double l1_ball_level(const RVector& a, double r) {
  std::vector<double> sorted(a.begin(), a.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumsum += sorted[k];
    const double cand = (cumsum - r) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || cand >= sorted[k + 1]) {
      theta = cand;
      break;
    }
  }
  return std::max(theta, 0.0);
}

RVector shrink(const RVector& a, double theta) { return (a.array() - theta).cwiseMax(0.0); }

}  // namespace

CMatrix prox_nuclear(const CMatrix& Z, double t) {
  check_threshold(t, "prox_nuclear");
  if (t == 0.0 || Z.size() == 0) return Z;
  const Svd d = thin_svd(Z);
  return from_svd(d, shrink(d.s, t));
}

CMatrix prox_row_l12(const CMatrix& Z, double t) {
  check_threshold(t, "prox_row_l12");
  if (t == 0.0) return Z;
  const RVector norms = Z.rowwise().norm();
  return rescale_rows(Z, norms, shrink(norms, t));
}

CMatrix prox_col_l12(const CMatrix& Z, double t) {
  return prox_row_l12(Z.adjoint(), t).adjoint();
}

void project_epigraph(NormKind kind, double weight, CMatrix& Z, double& t) {
  if (!(weight > 0.0)) throw InvalidArgument("project_epigraph: weight must be positive");
  const bool transpose = kind == NormKind::ColL12;
  Svd d;
  RVector a;
  if (kind == NormKind::Nuclear) {
    d = thin_svd(Z);
    a = d.s;
  } else {
    a = transpose ? RVector(Z.colwise().norm().transpose()) : RVector(Z.rowwise().norm());
  }
  const double g = a.sum();
  if (g <= weight * t) return;

  const double t0 = t;
  // phi(t) = dist(Z, ball(w t))^2 + (t - t0)^2 is convex with
  // phi'(t) = -2 w theta(w t) + 2 (t - t0).
  const auto slope = [&](double tt) { return -weight * l1_ball_level(a, weight * tt) + (tt - t0); };
  double lo = std::max(0.0, t0);
  double hi = g / weight;
  if (slope(0.0) >= 0.0) {
    Z.setZero();
    t = 0.0;
    return;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  t = 0.5 * (lo + hi);
  const RVector target = shrink(a, l1_ball_level(a, weight * t));
  if (kind == NormKind::Nuclear) {
    Z = from_svd(d, target);
  } else if (transpose) {
    Z = rescale_rows(Z.adjoint(), a, target).adjoint();
  } else {
    Z = rescale_rows(Z, a, target);
  }
}

AffineProjector::AffineProjector(const MeasurementOperator& A) : A_(&A) {
  CMatrix gram = A.stacked().adjoint() * A.stacked();
  gram_.compute(gram);
  // LLT only fails on a nonpositive pivot; a dependent row usually leaves a
  // pivot at roundoff level instead.
  const double scale = gram.diagonal().real().maxCoeff();
  const CMatrix L = gram_.matrixL();
  const bool tiny_pivot = L.diagonal().real().cwiseAbs2().minCoeff() < 1e-12 * scale;
  if (gram_.info() != Eigen::Success || tiny_pivot) {
    gram.diagonal().array() += 1e-12 * scale;
    gram_.compute(gram);
    regularized_ = true;
    if (gram_.info() != Eigen::Success) throw DegenerateInput("AffineProjector: Gram system is singular");
  }
}

CMatrix AffineProjector::project(const CVector& b, const CMatrix& Z) const {
  if (b.size() != A_->m()) throw InvalidArgument("project_affine: measurement length does not match operator");
  const CVector r = b - spf::apply(*A_, Z);
  return Z + adjoint(*A_, gram_.solve(r));
}

CMatrix project_affine(const MeasurementOperator& A, const CVector& b, const CMatrix& Z) {
  return AffineProjector(A).project(b, Z);
}

namespace {

struct Block {
  NormKind kind;
  double weight;
};

double require_weight(const std::optional<double>& w, const char* name) {
  if (!w || !(*w > 0.0))
    throw InvalidArgument(std::string("bp_solve: oracle weight ") + name + " must be present and positive");
  return *w;
}

void check_config(const AdmmConfig& cfg) {
  if (!(cfg.penalty > 0.0)) throw InvalidArgument("bp_solve: penalty must be positive");
  if (!(cfg.primal_tol > 0.0) || !(cfg.dual_tol > 0.0)) throw InvalidArgument("bp_solve: tolerances must be positive");
  if (cfg.max_iters < 1) throw InvalidArgument("bp_solve: max_iters must be >= 1");
}

// min g(Z) s.t. A(Z) = b with Z-update = affine projection, Y-update = prox.
BpResult two_block(const AffineProjector& P, const CVector& b, NormKind kind, const AdmmConfig& cfg) {
  const MeasurementOperator& A = P.op();
  const double rho = cfg.penalty;
  const auto prox = [&](const CMatrix& V) {
    return kind == NormKind::Nuclear ? prox_nuclear(V, 1.0 / rho) : prox_row_l12(V, 1.0 / rho);
  };
  CMatrix Y = P.project(b, CMatrix::Zero(A.n1(), A.n2()));
  CMatrix U = CMatrix::Zero(A.n1(), A.n2());
  CMatrix Z = Y;
  BpResult out;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    Z = P.project(b, Y - U);
    const CMatrix Y_prev = Y;
    Y = prox(Z + U);
    U += Z - Y;
    out.iterations = k;
    out.primal_residual = (Z - Y).norm();
    out.dual_residual = rho * (Y - Y_prev).norm();
    const double scale = std::max({1.0, Z.norm(), Y.norm()});
    if (out.primal_residual <= cfg.primal_tol * scale && out.dual_residual <= cfg.dual_tol * std::max(1.0, rho * U.norm())) {
      out.converged = true;
      break;
    }
  }
  out.Z = std::move(Z);
  return out;
}

// Consensus ADMM on (Z, t): block 0 carries t + indicator of A(Z) = b, the
// remaining blocks are the epigraphs { g_i(Z) <= w_i t }.
BpResult consensus(const AffineProjector& P, const CVector& b, const std::vector<Block>& blocks, const AdmmConfig& cfg) {
  const MeasurementOperator& A = P.op();
  const double rho = cfg.penalty;
  const std::size_t N = blocks.size() + 1;
  const double scale_n = std::sqrt(static_cast<double>(N));

  CMatrix Zbar = P.project(b, CMatrix::Zero(A.n1(), A.n2()));
  double tbar = 0.0;
  for (const Block& blk : blocks) {
    const double g = blk.kind == NormKind::Nuclear ? nuclear_norm(Zbar)
                     : blk.kind == NormKind::RowL12 ? row_l12_norm(Zbar)
                                                    : col_l12_norm(Zbar);
    tbar = std::max(tbar, g / blk.weight);
  }
  std::vector<CMatrix> Zi(N, Zbar), Ui(N, CMatrix::Zero(A.n1(), A.n2()));
  std::vector<double> ti(N, tbar), ui(N, 0.0);

  BpResult out;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    Zi[0] = P.project(b, Zbar - Ui[0]);
    ti[0] = tbar - ui[0] - 1.0 / rho;
    for (std::size_t i = 1; i < N; ++i) {
      Zi[i] = Zbar - Ui[i];
      ti[i] = tbar - ui[i];
      project_epigraph(blocks[i - 1].kind, blocks[i - 1].weight, Zi[i], ti[i]);
    }

    const CMatrix Zbar_prev = Zbar;
    const double tbar_prev = tbar;
    Zbar.setZero();
    tbar = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      Zbar += Zi[i] + Ui[i];
      tbar += ti[i] + ui[i];
    }
    Zbar /= static_cast<double>(N);
    tbar /= static_cast<double>(N);

    double primal_sq = 0.0, dual_norm_sq = 0.0, x_sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      Ui[i] += Zi[i] - Zbar;
      ui[i] += ti[i] - tbar;
      primal_sq += (Zi[i] - Zbar).squaredNorm() + (ti[i] - tbar) * (ti[i] - tbar);
      dual_norm_sq += Ui[i].squaredNorm() + ui[i] * ui[i];
      x_sq += Zi[i].squaredNorm() + ti[i] * ti[i];
    }
    out.iterations = k;
    out.primal_residual = std::sqrt(primal_sq);
    out.dual_residual =
        rho * scale_n * std::sqrt((Zbar - Zbar_prev).squaredNorm() + (tbar - tbar_prev) * (tbar - tbar_prev));
    const double zscale = std::max(1.0, scale_n * std::sqrt(Zbar.squaredNorm() + tbar * tbar));
    if (out.primal_residual <= cfg.primal_tol * std::max(zscale, std::sqrt(x_sq)) &&
        out.dual_residual <= cfg.dual_tol * std::max(1.0, rho * std::sqrt(dual_norm_sq))) {
      out.converged = true;
      break;
    }
  }
  out.Z = P.project(b, Zbar);
  return out;
}

}  // namespace

BpResult bp_solve(const BpProblem& problem, BpVariant variant, const AdmmConfig& cfg,
                  const AffineProjector& projector) {
  if (problem.A == nullptr) throw InvalidArgument("bp_solve: operator is null");
  if (&projector.op() != problem.A) throw InvalidArgument("bp_solve: projector built for a different operator");
  check_config(cfg);
  if (problem.b.size() != problem.A->m()) throw InvalidArgument("bp_solve: measurement length does not match operator");

  BpResult out;
  switch (variant) {
    case BpVariant::LR:
      out = two_block(projector, problem.b, NormKind::Nuclear, cfg);
      break;
    case BpVariant::RS:
      out = two_block(projector, problem.b, NormKind::RowL12, cfg);
      break;
    case BpVariant::RSLR:
      out = consensus(projector, problem.b,
                      {{NormKind::RowL12, require_weight(problem.weights.row_l12, "row_l12")},
                       {NormKind::Nuclear, require_weight(problem.weights.nuclear, "nuclear")}},
                      cfg);
      break;
    case BpVariant::DS:
      out = consensus(projector, problem.b,
                      {{NormKind::RowL12, require_weight(problem.weights.row_l12, "row_l12")},
                       {NormKind::ColL12, require_weight(problem.weights.col_l12, "col_l12")}},
                      cfg);
      break;
    case BpVariant::DSLR:
      out = consensus(projector, problem.b,
                      {{NormKind::RowL12, require_weight(problem.weights.row_l12, "row_l12")},
                       {NormKind::ColL12, require_weight(problem.weights.col_l12, "col_l12")},
                       {NormKind::Nuclear, require_weight(problem.weights.nuclear, "nuclear")}},
                      cfg);
      break;
  }
  out.gram_regularized = projector.regularized();
  return out;
}

BpResult bp_solve(const BpProblem& problem, BpVariant variant, const AdmmConfig& cfg) {
  if (problem.A == nullptr) throw InvalidArgument("bp_solve: operator is null");
  const AffineProjector projector(*problem.A);
  return bp_solve(problem, variant, cfg, projector);
}

}  // namespace spf
