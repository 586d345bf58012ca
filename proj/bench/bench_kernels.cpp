// Serial reference kernels against the OpenMP ones, at the operator sizes the
// experiments use. Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include "spf/measurement.hpp"
#include "spf/rng.hpp"

namespace {

spf::MeasurementOperator make_op(benchmark::State& state) {
  spf::GaussianSpec gs;
  gs.m = state.range(0);
  gs.n1 = state.range(1);
  gs.n2 = state.range(2);
  gs.seed = 1;
  return spf::gaussian_operator(gs);
}

spf::CVector vec(std::uint64_t seed, Eigen::Index n) {
  spf::CounterRng rng(seed);
  return spf::complex_normal_vector(rng, static_cast<std::size_t>(n));
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({96, 128, 8})->Args({288, 256, 64})->Args({128, 64, 64})->Unit(benchmark::kMicrosecond);
}

template <bool Parallel>
void BM_apply(benchmark::State& state) {
  const auto A = make_op(state);
  const spf::CMatrix Z = vec(2, A.n1()) * vec(3, A.n2()).adjoint();
  for (auto _ : state) {
    spf::CVector b = Parallel ? spf::apply(A, Z) : spf::serial::apply(A, Z);
    benchmark::DoNotOptimize(b.data());
  }
}

template <bool Parallel>
void BM_adjoint(benchmark::State& state) {
  const auto A = make_op(state);
  const spf::CVector w = vec(2, A.m());
  for (auto _ : state) {
    spf::CMatrix M = Parallel ? spf::adjoint(A, w) : spf::serial::adjoint(A, w);
    benchmark::DoNotOptimize(M.data());
  }
}

template <bool Parallel>
void BM_build_F(benchmark::State& state) {
  const auto A = make_op(state);
  const spf::CVector y = vec(2, A.n2());
  for (auto _ : state) {
    spf::CMatrix F = Parallel ? spf::build_F(A, y) : spf::serial::build_F(A, y);
    benchmark::DoNotOptimize(F.data());
  }
}

template <bool Parallel>
void BM_build_G(benchmark::State& state) {
  const auto A = make_op(state);
  const spf::CVector x = vec(2, A.n1());
  for (auto _ : state) {
    spf::CMatrix G = Parallel ? spf::build_G(A, x) : spf::serial::build_G(A, x);
    benchmark::DoNotOptimize(G.data());
  }
}

}  // namespace

BENCHMARK(BM_apply<false>)->Name("apply/serial")->Apply(sizes);
BENCHMARK(BM_apply<true>)->Name("apply/omp")->Apply(sizes);
BENCHMARK(BM_adjoint<false>)->Name("adjoint/serial")->Apply(sizes);
BENCHMARK(BM_adjoint<true>)->Name("adjoint/omp")->Apply(sizes);
BENCHMARK(BM_build_F<false>)->Name("build_F/serial")->Apply(sizes);
BENCHMARK(BM_build_F<true>)->Name("build_F/omp")->Apply(sizes);
BENCHMARK(BM_build_G<false>)->Name("build_G/serial")->Apply(sizes);
BENCHMARK(BM_build_G<true>)->Name("build_G/omp")->Apply(sizes);

BENCHMARK_MAIN();
