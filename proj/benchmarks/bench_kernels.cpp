#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "openworld/kernels.hpp"

namespace k = ow::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

template <auto Fn>
void BM_gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_vec(n * n, 1), b = random_vec(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Fn(a, b, c, n, n, n);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * n * n * n));
}

template <auto Fn>
void BM_nearest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 8;
  auto q = random_vec(n * d, 3), r = random_vec(n * d, 4);
  std::vector<std::size_t> idx(n);
  std::vector<double> dist(n);
  for (auto _ : state) {
    Fn(q, r, idx, dist, n, n, d);
    benchmark::DoNotOptimize(dist.data());
  }
}

template <auto Fn>
void BM_sliced_w1(benchmark::State& state) {
  const std::size_t np = 100;
  const auto n = static_cast<std::size_t>(state.range(0));
  auto p = random_vec(np * n, 5), q = random_vec(np * n, 6);
  std::vector<double> value(np), grad(np * n);
  for (auto _ : state) {
    Fn(p, q, value, grad, np, n);
    benchmark::DoNotOptimize(grad.data());
  }
}

}  // namespace

BENCHMARK(BM_gemm<k::serial::gemm>)->Name("gemm/serial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_gemm<k::omp::gemm>)->Name("gemm/omp")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_nearest<k::serial::nearest>)->Name("nearest/serial")->Arg(500)->Arg(2000);
BENCHMARK(BM_nearest<k::omp::nearest>)->Name("nearest/omp")->Arg(500)->Arg(2000);
BENCHMARK(BM_sliced_w1<k::serial::sliced_w1>)->Name("sliced_w1/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_sliced_w1<k::omp::sliced_w1>)->Name("sliced_w1/omp")->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
