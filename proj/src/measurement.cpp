#include "spf/measurement.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <omp.h>

#include "spf/rng.hpp"

namespace spf {

namespace {

// Work below this many complex multiply-adds stays on the calling thread.
constexpr Eigen::Index kParallelGrain = 1 << 15;

void check_shape(const MeasurementOperator& A, const CMatrix& Z, const char* what) {
  if (Z.rows() != A.n1() || Z.cols() != A.n2())
    throw InvalidArgument(std::string(what) + ": expected " + std::to_string(A.n1()) + "x" +
                          std::to_string(A.n2()) + " matrix, got " + std::to_string(Z.rows()) +
                          "x" + std::to_string(Z.cols()));
}

void check_length(Eigen::Index expected, const CVector& v, const char* what) {
  if (v.size() != expected)
    throw InvalidArgument(std::string(what) + ": expected length " + std::to_string(expected) +
                          ", got " + std::to_string(v.size()));
}

bool go_parallel(const MeasurementOperator& A) {
  return A.m() * A.n1() * A.n2() >= kParallelGrain;
}

}  // namespace

MeasurementOperator::MeasurementOperator(const std::vector<CMatrix>& matrices, std::uint64_t seed)
    : seed_(seed) {
  if (matrices.empty()) throw InvalidArgument("MeasurementOperator: need at least one matrix");
  n1_ = matrices.front().rows();
  n2_ = matrices.front().cols();
  if (n1_ <= 0 || n2_ <= 0) throw InvalidArgument("MeasurementOperator: empty matrix shape");
  stacked_.resize(n1_ * n2_, static_cast<Eigen::Index>(matrices.size()));
  for (std::size_t l = 0; l < matrices.size(); ++l) {
    const CMatrix& M = matrices[l];
    if (M.rows() != n1_ || M.cols() != n2_)
      throw InvalidArgument("MeasurementOperator: matrices differ in shape");
    require_finite(M, "MeasurementOperator");
    stacked_.col(static_cast<Eigen::Index>(l)) = M.reshaped();
  }
}

MeasurementOperator::MeasurementOperator(Eigen::Index n1, Eigen::Index n2, CMatrix stacked,
                                         std::uint64_t seed)
    : n1_(n1), n2_(n2), seed_(seed), stacked_(std::move(stacked)) {
  if (n1_ <= 0 || n2_ <= 0 || stacked_.cols() < 1 || stacked_.rows() != n1_ * n2_)
    throw InvalidArgument("MeasurementOperator: stacked storage must be (n1*n2) x m with m >= 1");
}

CVector apply(const MeasurementOperator& A, const CMatrix& Z) {
  check_shape(A, Z, "apply");
  const CMatrix& S = A.stacked();
  const auto z = Z.reshaped();
  CVector out(A.m());
#pragma omp parallel for schedule(static) if (go_parallel(A))
  for (Eigen::Index l = 0; l < A.m(); ++l) out[l] = S.col(l).dot(z);
  return out;
}

CMatrix adjoint(const MeasurementOperator& A, const CVector& w) {
  check_length(A.m(), w, "adjoint");
  const CMatrix& S = A.stacked();
  const Eigen::Index N = S.rows();
  CVector flat(N);
#pragma omp parallel if (go_parallel(A))
  {
    const int nt = omp_get_num_threads();
    const int tid = omp_get_thread_num();
    const Eigen::Index chunk = (N + nt - 1) / nt;
    const Eigen::Index begin = std::min<Eigen::Index>(N, chunk * tid);
    const Eigen::Index len = std::min<Eigen::Index>(N, begin + chunk) - begin;
    if (len > 0) flat.segment(begin, len).noalias() = S.middleRows(begin, len) * w;
  }
  return flat.reshaped(A.n1(), A.n2());
}

CMatrix build_F(const MeasurementOperator& A, const CVector& y) {
  check_length(A.n2(), y, "build_F");
  CMatrix F(A.m(), A.n1());
#pragma omp parallel for schedule(static) if (go_parallel(A))
  for (Eigen::Index l = 0; l < A.m(); ++l) F.row(l) = (A.matrix(l) * y).adjoint();
  return F;
}

CMatrix build_G(const MeasurementOperator& A, const CVector& x) {
  check_length(A.n1(), x, "build_G");
  CMatrix G(A.m(), A.n2());
#pragma omp parallel for schedule(static) if (go_parallel(A))
  for (Eigen::Index l = 0; l < A.m(); ++l) G.row(l) = x.adjoint() * A.matrix(l);
  return G;
}

namespace serial {

CVector apply(const MeasurementOperator& A, const CMatrix& Z) {
  check_shape(A, Z, "apply");
  CVector out = CVector::Zero(A.m());
  for (Eigen::Index l = 0; l < A.m(); ++l) {
    const auto M = A.matrix(l);
    Complex acc(0.0, 0.0);
    for (Eigen::Index k = 0; k < A.n2(); ++k)
      for (Eigen::Index j = 0; j < A.n1(); ++j) acc += std::conj(M(j, k)) * Z(j, k);
    out[l] = acc;
  }
  return out;
}

CMatrix adjoint(const MeasurementOperator& A, const CVector& w) {
  check_length(A.m(), w, "adjoint");
  CMatrix out = CMatrix::Zero(A.n1(), A.n2());
  for (Eigen::Index l = 0; l < A.m(); ++l) {
    const auto M = A.matrix(l);
    for (Eigen::Index k = 0; k < A.n2(); ++k)
      for (Eigen::Index j = 0; j < A.n1(); ++j) out(j, k) += w[l] * M(j, k);
  }
  return out;
}

CMatrix build_F(const MeasurementOperator& A, const CVector& y) {
  check_length(A.n2(), y, "build_F");
  CMatrix F = CMatrix::Zero(A.m(), A.n1());
  for (Eigen::Index l = 0; l < A.m(); ++l) {
    const auto M = A.matrix(l);
    // (y^* M^*)_j = sum_k conj(y_k) conj(M_{j,k})
    for (Eigen::Index j = 0; j < A.n1(); ++j) {
      Complex acc(0.0, 0.0);
      for (Eigen::Index k = 0; k < A.n2(); ++k) acc += std::conj(y[k]) * std::conj(M(j, k));
      F(l, j) = acc;
    }
  }
  return F;
}

CMatrix build_G(const MeasurementOperator& A, const CVector& x) {
  check_length(A.n1(), x, "build_G");
  CMatrix G = CMatrix::Zero(A.m(), A.n2());
  for (Eigen::Index l = 0; l < A.m(); ++l) {
    const auto M = A.matrix(l);
    for (Eigen::Index k = 0; k < A.n2(); ++k) {
      Complex acc(0.0, 0.0);
      for (Eigen::Index j = 0; j < A.n1(); ++j) acc += std::conj(x[j]) * M(j, k);
      G(l, k) = acc;
    }
  }
  return G;
}

}  // namespace serial

MeasurementOperator gaussian_operator(const GaussianSpec& spec) {
  if (spec.m < 1 || spec.n1 < 1 || spec.n2 < 1)
    throw InvalidArgument("gaussian_operator: dimensions must be positive");
  const auto entries = static_cast<unsigned __int128>(spec.m) * spec.n1 * spec.n2;
  if (entries * sizeof(Complex) > spec.memory_budget_bytes)
    throw ResourceError("gaussian_operator: " + std::to_string(spec.m) + "x" + std::to_string(spec.n1) +
                        "x" + std::to_string(spec.n2) + " operator exceeds memory budget of " +
                        std::to_string(spec.memory_budget_bytes) + " bytes");
  const Eigen::Index N = spec.n1 * spec.n2;
  const double variance = 1.0 / static_cast<double>(spec.m);
  CMatrix stacked(N, spec.m);
#pragma omp parallel for schedule(static) if (spec.m * N >= kParallelGrain)
  for (Eigen::Index l = 0; l < spec.m; ++l) {
    const auto base = static_cast<std::uint64_t>(l) * static_cast<std::uint64_t>(N);
    for (Eigen::Index e = 0; e < N; ++e)
      stacked(e, l) = CounterRng::complex_normal_at(spec.seed, base + static_cast<std::uint64_t>(e), variance);
  }
  return MeasurementOperator(spec.n1, spec.n2, std::move(stacked), spec.seed);
}

MeasurementOperator vectorization_operator(Eigen::Index n1, Eigen::Index n2) {
  if (n1 < 1 || n2 < 1) throw InvalidArgument("vectorization_operator: dimensions must be positive");
  return MeasurementOperator(n1, n2, CMatrix::Identity(n1 * n2, n1 * n2));
}

MeasurementOperator lift_bilinear(const BilinearProblem& problem) {
  if (problem.m < 1 || problem.n1 < 1 || problem.n2 < 1 ||
      problem.coefficients.size() != static_cast<std::size_t>(problem.m * problem.n1 * problem.n2))
    throw InvalidArgument("lift_bilinear: coefficient tensor does not match (m, n1, n2)");
  CMatrix stacked(problem.n1 * problem.n2, problem.m);
  for (Eigen::Index l = 0; l < problem.m; ++l)
    for (Eigen::Index k = 0; k < problem.n2; ++k)
      for (Eigen::Index j = 0; j < problem.n1; ++j) {
        const Complex f = problem.at(l, j, k);
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
          throw InvalidArgument("lift_bilinear: non-finite coefficient");
        stacked(j + k * problem.n1, l) = std::conj(f);
      }
  return MeasurementOperator(problem.n1, problem.n2, std::move(stacked));
}

BilinearProblem make_convolution_lifting(Eigen::Index n) {
  if (n < 2) throw InvalidArgument("make_convolution_lifting: n must be >= 2");
  BilinearProblem p;
  p.m = p.n1 = p.n2 = n;
  p.coefficients.assign(static_cast<std::size_t>(n * n * n), Complex(0.0, 0.0));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) p.at((j + k) % n, j, k) = 1.0;
  return p;
}

// ---------------------------------------------------------------------------
// Binary I/O

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'P', 'F', 'M', 'E', 'A', 'S', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw InvalidArgument("binary read: unexpected end of stream");
  return to_little(v);
}

void put_complex(std::ostream& out, Complex z) {
  put(out, z.real());
  put(out, z.imag());
}

Complex get_complex(std::istream& in) {
  const double re = get<double>(in);
  const double im = get<double>(in);
  return {re, im};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path + " for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path);
  return f;
}

}  // namespace

void write_operator(std::ostream& out, const MeasurementOperator& A) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(A.m()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(A.n1()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(A.n2()));
  put<std::uint64_t>(out, A.seed());
  const CMatrix& S = A.stacked();
  for (Eigen::Index l = 0; l < S.cols(); ++l)
    for (Eigen::Index e = 0; e < S.rows(); ++e) put_complex(out, S(e, l));
}

MeasurementOperator read_operator(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InvalidArgument("read_operator: bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw InvalidArgument("read_operator: unsupported version " + std::to_string(version));
  (void)get<std::uint32_t>(in);
  const auto m = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const auto n1 = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const auto n2 = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  const auto seed = get<std::uint64_t>(in);
  if (m < 1 || n1 < 1 || n2 < 1) throw InvalidArgument("read_operator: bad dimensions");
  CMatrix S(n1 * n2, m);
  for (Eigen::Index l = 0; l < m; ++l)
    for (Eigen::Index e = 0; e < n1 * n2; ++e) S(e, l) = get_complex(in);
  require_finite(S, "read_operator");
  return MeasurementOperator(n1, n2, std::move(S), seed);
}

void save_operator(const std::string& path, const MeasurementOperator& A) {
  auto f = open_out(path);
  write_operator(f, A);
}

MeasurementOperator load_operator(const std::string& path) {
  auto f = open_in(path);
  return read_operator(f);
}

void save_vector(const std::string& path, const CVector& v) {
  auto f = open_out(path);
  put<std::uint64_t>(f, static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) put_complex(f, v[i]);
}

CVector load_vector(const std::string& path) {
  auto f = open_in(path);
  const auto n = static_cast<Eigen::Index>(get<std::uint64_t>(f));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = get_complex(f);
  require_finite(v, path);
  return v;
}

void save_matrix(const std::string& path, const CMatrix& M) {
  auto f = open_out(path);
  put<std::uint64_t>(f, static_cast<std::uint64_t>(M.rows()));
  put<std::uint64_t>(f, static_cast<std::uint64_t>(M.cols()));
  for (Eigen::Index k = 0; k < M.cols(); ++k)
    for (Eigen::Index j = 0; j < M.rows(); ++j) put_complex(f, M(j, k));
}

CMatrix load_matrix(const std::string& path) {
  auto f = open_in(path);
  const auto r = static_cast<Eigen::Index>(get<std::uint64_t>(f));
  const auto c = static_cast<Eigen::Index>(get<std::uint64_t>(f));
  CMatrix M(r, c);
  for (Eigen::Index k = 0; k < c; ++k)
    for (Eigen::Index j = 0; j < r; ++j) M(j, k) = get_complex(f);
  require_finite(M, path);
  return M;
}

}  // namespace spf
