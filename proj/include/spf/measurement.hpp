#pragma once

// Linear sensing operators A: C^{n1 x n2} -> C^m given by [A(Z)]_l = <M_l, Z>.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spf/numerics.hpp"

namespace spf {

// Dense stack of m sensing matrices M_l, each n1 x n2.
//
// Storage is one (n1*n2) x m matrix whose column l is vec(M_l) in
// column-major order, so A and A* are a single gemv each.
class MeasurementOperator {
 public:
  MeasurementOperator() = default;
  explicit MeasurementOperator(const std::vector<CMatrix>& matrices, std::uint64_t seed = 0);
  // `stacked` must be (n1*n2) x m.
  MeasurementOperator(Eigen::Index n1, Eigen::Index n2, CMatrix stacked, std::uint64_t seed = 0);

  Eigen::Index m() const noexcept { return stacked_.cols(); }
  Eigen::Index n1() const noexcept { return n1_; }
  Eigen::Index n2() const noexcept { return n2_; }
  std::uint64_t seed() const noexcept { return seed_; }

  Eigen::Map<const CMatrix> matrix(Eigen::Index l) const {
    return {stacked_.col(l).data(), n1_, n2_};
  }
  const CMatrix& stacked() const noexcept { return stacked_; }

 private:
  Eigen::Index n1_ = 0;
  Eigen::Index n2_ = 0;
  std::uint64_t seed_ = 0;
  CMatrix stacked_;
};

// [A(Z)]_l = trace(M_l^* Z).
CVector apply(const MeasurementOperator& A, const CMatrix& Z);
// A*(w) = sum_l w_l M_l.
CMatrix adjoint(const MeasurementOperator& A, const CVector& w);
// m x n1 matrix with row l equal to y^* M_l^*, so that A(x y^*) = F(y) x.
CMatrix build_F(const MeasurementOperator& A, const CVector& y);
// m x n2 matrix with row l equal to x^* M_l, so that A(x y^*) = conj(G(x) y).
CMatrix build_G(const MeasurementOperator& A, const CVector& x);

// Single-threaded reference kernels, written independently of the
// parallel ones above. Used by tests and the benchmark.
namespace serial {
CVector apply(const MeasurementOperator& A, const CMatrix& Z);
CMatrix adjoint(const MeasurementOperator& A, const CVector& w);
CMatrix build_F(const MeasurementOperator& A, const CVector& y);
CMatrix build_G(const MeasurementOperator& A, const CVector& x);
}  // namespace serial

struct GaussianSpec {
  Eigen::Index m = 1;
  Eigen::Index n1 = 1;
  Eigen::Index n2 = 1;
  std::uint64_t seed = 0;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
};

// i.i.d. CN(0, 1/m) entries: real and imaginary parts N(0, 1/(2m)).
// Entry e of the stacked storage is CounterRng::complex_normal_at(seed, e, 1/m).
MeasurementOperator gaussian_operator(const GaussianSpec& spec);

// M_l = E_{j,k} for l = j + k*n1: A(Z) is vec(Z).
MeasurementOperator vectorization_operator(Eigen::Index n1, Eigen::Index n2);

// Coefficients f_l(xi_j, zeta_k) of m bilinear forms, stored at
// coefficients[(l * n1 + j) * n2 + k].
struct BilinearProblem {
  Eigen::Index m = 0;
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  std::vector<Complex> coefficients;

  Complex& at(Eigen::Index l, Eigen::Index j, Eigen::Index k) {
    return coefficients[static_cast<std::size_t>((l * n1 + j) * n2 + k)];
  }
  Complex at(Eigen::Index l, Eigen::Index j, Eigen::Index k) const {
    return coefficients[static_cast<std::size_t>((l * n1 + j) * n2 + k)];
  }
};

// [M_l]_{j,k} = conj(f_l(xi_j, zeta_k)) so that A(u v^*)_l = sum_{j,k} u_j conj(v_k) f_l(xi_j, zeta_k).
MeasurementOperator lift_bilinear(const BilinearProblem& problem);

// Circular convolution in the standard bases: f_l(e_j, e_k) = [j + k = l mod n].
BilinearProblem make_convolution_lifting(Eigen::Index n);

// Binary container:
//   magic  "SPFMEAS\0" (8 bytes)
//   version u32 = 1, reserved u32 = 0
//   m, n1, n2, seed as u64
//   m * n1 * n2 complex entries as (re, im) float64 pairs, M_0 first,
//   each M_l in column-major order.
// All integers and floats are little-endian.
void write_operator(std::ostream& out, const MeasurementOperator& A);
MeasurementOperator read_operator(std::istream& in);
void save_operator(const std::string& path, const MeasurementOperator& A);
MeasurementOperator load_operator(const std::string& path);

// Plain little-endian complex vector file: u64 length then (re, im) pairs.
void save_vector(const std::string& path, const CVector& v);
CVector load_vector(const std::string& path);
// u64 rows, u64 cols, then column-major (re, im) pairs.
void save_matrix(const std::string& path, const CMatrix& M);
CMatrix load_matrix(const std::string& path);

}  // namespace spf
