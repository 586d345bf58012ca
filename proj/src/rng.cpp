#include "spf/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

namespace spf {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index + 1));
}

std::uint64_t CounterRng::at(std::uint64_t key, std::uint64_t k) noexcept {
  return mix64(key + (k + 1) * kGolden);
}

double CounterRng::uniform_at(std::uint64_t key, std::uint64_t k) noexcept {
  return static_cast<double>(at(key, k) >> 11) * 0x1.0p-53;
}

Complex CounterRng::complex_normal_at(std::uint64_t key, std::uint64_t k, double variance) noexcept {
  const double u0 = uniform_at(key, 2 * k);
  const double u1 = uniform_at(key, 2 * k + 1);
  const double r = std::sqrt(-2.0 * std::log1p(-u0));
  const double angle = 2.0 * std::numbers::pi * u1;
  const double scale = std::sqrt(variance / 2.0);
  return {scale * r * std::cos(angle), scale * r * std::sin(angle)};
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  // Reject the low remainder so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

double CounterRng::normal() noexcept {
  const double u0 = uniform();
  const double u1 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u0)) * std::cos(2.0 * std::numbers::pi * u1);
}

Complex CounterRng::complex_normal(double variance) noexcept {
  // Align to an even counter so draws match complex_normal_at.
  if (counter_ % 2 != 0) ++counter_;
  const Complex z = complex_normal_at(key_, counter_ / 2, variance);
  counter_ += 2;
  return z;
}

IndexSet random_subset(CounterRng& rng, std::size_t n, std::size_t k) {
  if (k > n) throw InvalidArgument("random_subset: k exceeds n");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return IndexSet(n, std::move(pool));
}

CVector complex_normal_vector(CounterRng& rng, std::size_t n, double variance) {
  CVector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = rng.complex_normal(variance);
  return out;
}

}  // namespace spf
