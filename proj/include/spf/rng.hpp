#pragma once

// Counter-based random numbers.
//
// The generator is SplitMix64 viewed as a keyed counter: draw k of the stream
// with key K is mix64(K + (k + 1) * 0x9E3779B97F4A7C15). Any draw can be
// computed independently of the others, so parallel fills are reproducible
// regardless of thread count.
//
// Streams are split with derive_seed(parent, index) = mix64(parent ^ mix64(index + 1)),
// giving master seed -> cell seed -> trial seed chains that can be recomputed
// for any subset of a grid.
//
// Uniform doubles use the top 53 bits. Normal variates use the Box-Muller
// transform on draws (2k, 2k+1): r = sqrt(-2 ln(1 - u0)), angle 2*pi*u1,
// yielding the pair (r cos, r sin). A complex CN(0, s2) variate uses the pair
// as real/imaginary parts, each scaled by sqrt(s2 / 2).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spf/numerics.hpp"

namespace spf {

std::uint64_t mix64(std::uint64_t z) noexcept;
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  // Stateless access to draw k.
  static std::uint64_t at(std::uint64_t key, std::uint64_t k) noexcept;
  static double uniform_at(std::uint64_t key, std::uint64_t k) noexcept;
  // CN(0, variance) variate number k (consumes draws 2k and 2k+1).
  static Complex complex_normal_at(std::uint64_t key, std::uint64_t k, double variance) noexcept;

  result_type operator()() noexcept { return at(key_, counter_++); }
  double uniform() noexcept { return uniform_at(key_, counter_++); }
  // Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  Complex complex_normal(double variance = 1.0) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

// k-subset of [0, n) drawn uniformly (partial Fisher-Yates), returned sorted.
IndexSet random_subset(CounterRng& rng, std::size_t n, std::size_t k);

// i.i.d. CN(0, variance) vector.
CVector complex_normal_vector(CounterRng& rng, std::size_t n, double variance = 1.0);

}  // namespace spf
