#pragma once

// Closed-form constants from the SPF/HTP recovery analysis, the
// information-theoretic lower bounds, and an empirical RIP estimator.
//
// All logarithms are natural.

#include <cstddef>
#include <cstdint>

#include "spf/measurement.hpp"

namespace spf::theory {

// HTP contraction constants for an RIP constant delta in (0, 1/sqrt(3)):
//   rho   = sqrt(2 delta^2 / (1 - delta^2))
//   tau   = sqrt(2 / (1 - delta^2)) + 1 / (1 - delta)
//   rho'  = 1 / sqrt(1 - delta^2)
//   tau'  = 1 / (1 - delta)
//   L     = ceil(ln(100 (2 rho' - rho)) / ln(1 / rho))
//   K     = ln(1 + 2 (rho' + (tau' / tau)(1 - rho) / 2)) / ln(2 / (1 + rho))
//   C_htp = 1.01 tau / (1 - rho)
struct TheoryConstants {
  double delta = 0.0;
  double rho = 0.0;
  double tau = 0.0;
  double rho_prime = 0.0;
  double tau_prime = 0.0;
  double C_htp = 0.0;
  long L = 0;
  double K = 0.0;
};

TheoryConstants htp_constants(double delta);

// ceil(L + K * s): inner HTP iterations sufficient for the error bound.
std::size_t htp_iteration_budget(std::size_t s, double delta);

// Fixed points of f(w) = asin(C_htp [delta tan w + (1 + delta) nu sec w]) on [0, pi/2).
// Omega = { w : w >= f(w) } is the interval [omega_inf, omega_sup] when nonempty.
struct OmegaBounds {
  double omega_inf = 0.0;
  double omega_sup = 0.0;
  bool feasible = false;
};

// f(w); +infinity where the asin argument exceeds 1.
double contraction_map(double omega, double delta, double nu);
OmegaBounds omega_bounds(double delta, double nu);

// Noise amplification of SPF at (delta0, nu0), with w~ = omega_inf(delta0, nu0)
// and C1 = C_htp(delta0).
//
// sin_theta: C1 (1 + delta0) sec w~ / (1 - C1 delta0 sec^2 w~), from bounding
//   tan w <= sin w sec^2 w~ on [0, w~]; limsup sin(theta_t) <= sin_theta * nu.
// frobenius: sin_theta * sqrt((1 + delta0) / (1 - delta0)); bounds the
//   relative Frobenius error.
// fixed_point: C1 (1 + delta0) / (cos w~ - C1 delta0), the tighter bound from
//   tan w <= sin w sec w~; equals sin(w~) / nu0.
struct NoiseAmplification {
  double sin_theta = 0.0;
  double frobenius = 0.0;
  double fixed_point = 0.0;
};

NoiseAmplification noise_amp_constant(double delta0, double nu0);

// sqrt((1 + delta) / (1 - delta)).
double frobenius_factor(double delta);

// m >= ((s1 + s2 - 2) ln(1 / (12 D)) - 7) / ln(1 + 1 / sigma2), D in (0, 1/12).
double measurement_lower_bound(std::size_t s1, std::size_t s2, double D, double sigma2);

// Degrees-of-freedom limit for stable recovery: s1 + s2 - 2.
long dof_bound(std::size_t s1, std::size_t s2);

// (n - 1) log+(1 / (6 D)) - 3.5, n >= 2, D in (0, 2).
double rate_distortion_lower(std::size_t n, double D);

// c1 r (s1 + s2) ln(max(n1 / s1, n2 / s2)); c1 is not known in closed form.
double rip_sample_size(double c1, std::size_t r, std::size_t s1, std::size_t s2, std::size_t n1,
                       std::size_t n2);

// Running max of | ||A(Z)||^2 - 1 | over n_samples random unit-Frobenius Z of
// rank <= r with <= s1 nonzero rows and <= s2 nonzero columns. Sample i is
// drawn from derive_seed(seed, i), so the estimate is non-decreasing in
// n_samples. A lower estimate of the true isometry constant.
double empirical_rip(const MeasurementOperator& A, std::size_t r, std::size_t s1, std::size_t s2,
                     std::size_t n_samples, std::uint64_t seed);

}  // namespace spf::theory
