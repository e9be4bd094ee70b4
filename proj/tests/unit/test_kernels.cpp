#include <random>
#include <vector>

#include "doctest.h"
#include "openworld/kernels.hpp"

using namespace ow;

namespace {

std::vector<double> random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

struct ModeGuard {
  kernels::Mode saved = kernels::mode();
  ~ModeGuard() { kernels::set_mode(saved); }
};

}  // namespace

TEST_CASE("gemm family matches a naive triple loop") {
  std::mt19937_64 rng(3);
  const std::size_t m = 7, k = 5, n = 4;
  auto a = random_matrix(m * k, rng), b = random_matrix(k * n, rng);
  std::vector<double> c(m * n);
  kernels::serial::gemm(a, b, c, m, k, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t t = 0; t < k; ++t) s += a[i * k + t] * b[t * n + j];
      CHECK(c[i * n + j] == doctest::Approx(s).epsilon(1e-12));
    }

  // A^T B with A m x k, B m x n.
  auto b2 = random_matrix(m * n, rng);
  std::vector<double> atb(k * n);
  kernels::serial::gemm_atb(a, b2, atb, m, k, n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t t = 0; t < m; ++t) s += a[t * k + i] * b2[t * n + j];
      CHECK(atb[i * n + j] == doctest::Approx(s).epsilon(1e-12));
    }

  // A B^T with A m x n, B k x n.
  auto a3 = random_matrix(m * n, rng), b3 = random_matrix(k * n, rng);
  std::vector<double> abt(m * k);
  kernels::serial::gemm_abt(a3, b3, abt, m, n, k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0;
      for (std::size_t t = 0; t < n; ++t) s += a3[i * n + t] * b3[j * n + t];
      CHECK(abt[i * k + j] == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("serial and OpenMP kernels agree bitwise") {
  std::mt19937_64 rng(11);
  const std::size_t shapes[][3] = {{1, 1, 1}, {33, 17, 9}, {128, 64, 100}};
  for (const auto& [m, k, n] : shapes) {
    auto a = random_matrix(m * k, rng), b = random_matrix(k * n, rng);
    std::vector<double> c1(m * n), c2(m * n);
    kernels::serial::gemm(a, b, c1, m, k, n);
    kernels::omp::gemm(a, b, c2, m, k, n);
    CHECK(c1 == c2);

    auto bm = random_matrix(m * n, rng);
    std::vector<double> d1(k * n), d2(k * n);
    kernels::serial::gemm_atb(a, bm, d1, m, k, n);
    kernels::omp::gemm_atb(a, bm, d2, m, k, n);
    CHECK(d1 == d2);

    auto bk = random_matrix(k * n, rng), am = random_matrix(m * n, rng);
    std::vector<double> e1(m * k), e2(m * k);
    kernels::serial::gemm_abt(am, bk, e1, m, n, k);
    kernels::omp::gemm_abt(am, bk, e2, m, n, k);
    CHECK(e1 == e2);
  }

  const std::size_t nq = 300, nr = 257, d = 3;
  auto q = random_matrix(nq * d, rng), r = random_matrix(nr * d, rng);
  std::vector<std::size_t> i1(nq), i2(nq);
  std::vector<double> dist1(nq), dist2(nq);
  kernels::serial::nearest(q, r, i1, dist1, nq, nr, d);
  kernels::omp::nearest(q, r, i2, dist2, nq, nr, d);
  CHECK(i1 == i2);
  CHECK(dist1 == dist2);

  const std::size_t np = 20, len = 513;
  auto p = random_matrix(np * len, rng), qq = random_matrix(np * len, rng);
  std::vector<double> v1(np, 0.0), v2(np, 0.0), g1(np * len), g2(np * len);
  kernels::serial::sliced_w1(p, qq, v1, g1, np, len);
  kernels::omp::sliced_w1(p, qq, v2, g2, np, len);
  CHECK(v1 == v2);
  CHECK(g1 == g2);
}

TEST_CASE("nearest matches exhaustive search") {
  std::mt19937_64 rng(5);
  const std::size_t n = 40, m = 60, d = 4;
  auto q = random_matrix(n * d, rng), r = random_matrix(m * d, rng);
  std::vector<std::size_t> idx(n);
  std::vector<double> dist(n);
  kernels::serial::nearest(q, r, idx, dist, n, m, d);
  for (std::size_t i = 0; i < n; ++i) {
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0;
      for (std::size_t t = 0; t < d; ++t) s += (q[i * d + t] - r[j * d + t]) * (q[i * d + t] - r[j * d + t]);
      if (s < best) {
        best = s;
        arg = j;
      }
    }
    CHECK(idx[i] == arg);
    CHECK(dist[i] == doctest::Approx(std::sqrt(best)).epsilon(1e-12));
  }
}

TEST_CASE("sliced_w1 writes the sorted matching cost and signs") {
  std::vector<double> p = {0.0, 2.0}, q = {3.0, 1.0};
  std::vector<double> value = {10.0}, grad(2);  // overwritten
  kernels::serial::sliced_w1(p, q, value, grad, 1, 2);
  CHECK(value[0] == doctest::Approx(1.0));
  CHECK(grad[0] == doctest::Approx(0.5));
  CHECK(grad[1] == doctest::Approx(0.5));
}

TEST_CASE("dispatch follows the selected mode") {
  ModeGuard guard;
  kernels::set_mode(kernels::Mode::Serial);
  CHECK(kernels::mode() == kernels::Mode::Serial);
  std::vector<double> a = {1, 2, 3, 4}, b = {5, 6, 7, 8}, c(4);
  kernels::gemm(a, b, c, 2, 2, 2);
  CHECK(c == std::vector<double>{19, 22, 43, 50});
  kernels::set_mode(kernels::Mode::Parallel);
  std::vector<double> c2(4);
  kernels::gemm(a, b, c2, 2, 2, 2);
  CHECK(c2 == c);
  CHECK(kernels::max_threads() >= 1);
}
