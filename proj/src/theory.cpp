#include "spf/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "spf/rng.hpp"

namespace spf::theory {

namespace {

void check_delta(double delta, const char* what) {
  if (!(delta > 0.0 && delta < 1.0 / std::sqrt(3.0)))
    throw InvalidArgument(std::string(what) + ": delta must lie in (0, 1/sqrt(3)), got " +
                          std::to_string(delta));
}

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr int kScanSamples = 10000;

double gap(double omega, double delta, double nu) {
  return omega - contraction_map(omega, delta, nu);
}

// Bisect g on [lo, hi] where sign(g(lo)) != sign(g(hi)) (g >= 0 counted as
// nonnegative), down to adjacent doubles. f is steep near pi/2, so a width
// tolerance alone leaves |g| well above the width.
double bisect(double lo, double hi, double delta, double nu) {
  const bool lo_in = gap(lo, delta, nu) >= 0.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((gap(mid, delta, nu) >= 0.0) == lo_in)
      lo = mid;
    else
      hi = mid;
  }
  // Endpoint on the inside of Omega.
  return lo_in ? lo : hi;
}

}  // namespace

TheoryConstants htp_constants(double delta) {
  check_delta(delta, "htp_constants");
  TheoryConstants c;
  c.delta = delta;
  const double d2 = delta * delta;
  c.rho = std::sqrt(2.0 * d2 / (1.0 - d2));
  c.tau = std::sqrt(2.0 / (1.0 - d2)) + 1.0 / (1.0 - delta);
  c.rho_prime = 1.0 / std::sqrt(1.0 - d2);
  c.tau_prime = 1.0 / (1.0 - delta);
  c.L = static_cast<long>(std::ceil(std::log(100.0 * (2.0 * c.rho_prime - c.rho)) / std::log(1.0 / c.rho)));
  c.K = std::log(1.0 + 2.0 * (c.rho_prime + (c.tau_prime / c.tau) * (1.0 - c.rho) / 2.0)) /
        std::log(2.0 / (1.0 + c.rho));
  c.C_htp = 1.01 * c.tau / (1.0 - c.rho);
  return c;
}

std::size_t htp_iteration_budget(std::size_t s, double delta) {
  check_delta(delta, "htp_iteration_budget");
  const TheoryConstants c = htp_constants(delta);
  return static_cast<std::size_t>(std::ceil(static_cast<double>(c.L) + c.K * static_cast<double>(s)));
}

double contraction_map(double omega, double delta, double nu) {
  const double C = htp_constants(delta).C_htp;
  const double arg = C * (delta * std::tan(omega) + (1.0 + delta) * nu / std::cos(omega));
  if (!(arg <= 1.0)) return std::numeric_limits<double>::infinity();
  return std::asin(arg);
}

OmegaBounds omega_bounds(double delta, double nu) {
  check_delta(delta, "omega_bounds");
  if (!(nu >= 0.0)) throw InvalidArgument("omega_bounds: nu must be nonnegative");

  // f is convex and increasing, so g(w) = w - f(w) is concave and Omega is
  // one interval. Scan a uniform grid on [0, pi/2) for it.
  std::vector<double> grid(kScanSamples);
  std::vector<bool> inside(kScanSamples);
  for (int i = 0; i < kScanSamples; ++i) {
    grid[i] = kHalfPi * static_cast<double>(i) / kScanSamples;
    inside[i] = gap(grid[i], delta, nu) >= 0.0;
  }
  int first = -1;
  int last = -1;
  for (int i = 0; i < kScanSamples; ++i)
    if (inside[i]) {
      if (first < 0) first = i;
      last = i;
    }

  OmegaBounds out;
  if (first < 0) {
    // The grid may step over a very short interval; check the maximizer of g.
    double lo = 0.0;
    double hi = grid.back();
    for (int it = 0; it < 200; ++it) {
      const double a = lo + (hi - lo) / 3.0;
      const double b = hi - (hi - lo) / 3.0;
      if (gap(a, delta, nu) < gap(b, delta, nu))
        lo = a;
      else
        hi = b;
    }
    const double peak = 0.5 * (lo + hi);
    if (gap(peak, delta, nu) < 0.0) return out;
    out.feasible = true;
    out.omega_inf = bisect(0.0, peak, delta, nu);
    out.omega_sup = bisect(peak, grid.back(), delta, nu);
    return out;
  }

  out.feasible = true;
  out.omega_inf = first == 0 ? 0.0 : bisect(grid[first - 1], grid[first], delta, nu);
  out.omega_sup = last == kScanSamples - 1 ? grid[last] : bisect(grid[last], grid[last + 1], delta, nu);
  return out;
}

double frobenius_factor(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("frobenius_factor: delta must lie in [0, 1)");
  return std::sqrt((1.0 + delta) / (1.0 - delta));
}

NoiseAmplification noise_amp_constant(double delta0, double nu0) {
  check_delta(delta0, "noise_amp_constant");
  const OmegaBounds bounds = omega_bounds(delta0, nu0);
  if (!bounds.feasible)
    throw InvalidArgument("noise_amp_constant: no contraction region at (delta0, nu0)");
  const double C1 = htp_constants(delta0).C_htp;
  const double sec = 1.0 / std::cos(bounds.omega_inf);
  const double loose_den = 1.0 - C1 * delta0 * sec * sec;
  const double tight_den = std::cos(bounds.omega_inf) - C1 * delta0;
  if (!(loose_den > 0.0) || !(tight_den > 0.0))
    throw InvalidArgument("noise_amp_constant: linearized map does not contract at (delta0, nu0)");
  NoiseAmplification out;
  out.sin_theta = C1 * (1.0 + delta0) * sec / loose_den;
  out.frobenius = out.sin_theta * frobenius_factor(delta0);
  out.fixed_point = C1 * (1.0 + delta0) / tight_den;
  return out;
}

double measurement_lower_bound(std::size_t s1, std::size_t s2, double D, double sigma2) {
  if (!(D > 0.0 && D < 1.0 / 12.0))
    throw InvalidArgument("measurement_lower_bound: D must lie in (0, 1/12)");
  if (!(sigma2 > 0.0)) throw InvalidArgument("measurement_lower_bound: sigma2 must be positive");
  if (s1 < 1 || s2 < 1) throw InvalidArgument("measurement_lower_bound: sparsities must be >= 1");
  const double dof = static_cast<double>(s1 + s2) - 2.0;
  return (dof * std::log(1.0 / (12.0 * D)) - 7.0) / std::log1p(1.0 / sigma2);
}

long dof_bound(std::size_t s1, std::size_t s2) {
  if (s1 < 1 || s2 < 1) throw InvalidArgument("dof_bound: sparsities must be >= 1");
  return static_cast<long>(s1 + s2) - 2;
}

double rate_distortion_lower(std::size_t n, double D) {
  if (n < 2) throw InvalidArgument("rate_distortion_lower: n must be >= 2");
  if (!(D > 0.0 && D < 2.0)) throw InvalidArgument("rate_distortion_lower: D must lie in (0, 2)");
  const double log_plus = std::max(std::log(1.0 / (6.0 * D)), 0.0);
  return static_cast<double>(n - 1) * log_plus - 3.5;
}

double rip_sample_size(double c1, std::size_t r, std::size_t s1, std::size_t s2, std::size_t n1,
                       std::size_t n2) {
  if (!(c1 > 0.0) || r < 1 || s1 < 1 || s2 < 1 || s1 > n1 || s2 > n2)
    throw InvalidArgument("rip_sample_size: invalid parameters");
  const double ratio = std::max(static_cast<double>(n1) / static_cast<double>(s1),
                                static_cast<double>(n2) / static_cast<double>(s2));
  return c1 * static_cast<double>(r) * static_cast<double>(s1 + s2) * std::log(ratio);
}

double empirical_rip(const MeasurementOperator& A, std::size_t r, std::size_t s1, std::size_t s2,
                     std::size_t n_samples, std::uint64_t seed) {
  if (r < 1 || r > 2) throw InvalidArgument("empirical_rip: rank must be 1 or 2");
  if (n_samples < 1) throw InvalidArgument("empirical_rip: need at least one sample");
  const auto n1 = static_cast<std::size_t>(A.n1());
  const auto n2 = static_cast<std::size_t>(A.n2());
  if (s1 < 1 || s2 < 1 || s1 > n1 || s2 > n2) throw InvalidArgument("empirical_rip: invalid sparsities");

  std::vector<double> deviation(n_samples);
  const auto count = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const IndexSet rows = random_subset(rng, n1, s1);
    const IndexSet cols = random_subset(rng, n2, s2);
    CMatrix Z = CMatrix::Zero(A.n1(), A.n2());
    for (std::size_t term = 0; term < r; ++term) {
      const CVector a = complex_normal_vector(rng, s1);
      const CVector b = complex_normal_vector(rng, s2);
      for (std::size_t p = 0; p < s1; ++p)
        for (std::size_t q = 0; q < s2; ++q)
          Z(static_cast<Eigen::Index>(rows[p]), static_cast<Eigen::Index>(cols[q])) +=
              a[static_cast<Eigen::Index>(p)] * std::conj(b[static_cast<Eigen::Index>(q)]);
    }
    Z /= Z.norm();
    deviation[static_cast<std::size_t>(i)] = std::abs(spf::apply(A, Z).squaredNorm() - 1.0);
  }
  return *std::max_element(deviation.begin(), deviation.end());
}

}  // namespace spf::theory
