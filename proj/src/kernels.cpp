#include "openworld/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <omp.h>

namespace ow::kernels {

namespace {

std::atomic<Mode> g_mode{Mode::Parallel};

using idx = std::ptrdiff_t;

inline void gemm_row(const double* a, const double* b, double* c, std::size_t k, std::size_t n) {
  std::fill(c, c + n, 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    const double av = a[t];
    const double* br = b + t * n;
    for (std::size_t j = 0; j < n; ++j) c[j] += av * br[j];
  }
}

// Row i of A^T B: sum over r of A[r, i] * B[r, :].
inline void gemm_atb_row(const double* a, const double* b, double* c, std::size_t i, std::size_t m, std::size_t k,
                         std::size_t n) {
  std::fill(c, c + n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const double av = a[r * k + i];
    if (av == 0.0) continue;
    const double* br = b + r * n;
    for (std::size_t j = 0; j < n; ++j) c[j] += av * br[j];
  }
}

inline void gemm_abt_row(const double* a, const double* b, double* c, std::size_t n, std::size_t k) {
  for (std::size_t j = 0; j < k; ++j) {
    const double* br = b + j * n;
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += a[t] * br[t];
    c[j] = s;
  }
}

inline void nearest_one(const double* q, const double* refs, std::size_t m, std::size_t d, std::size_t& best_i,
                        double& best_d) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0;
  for (std::size_t r = 0; r < m; ++r) {
    const double* y = refs + r * d;
    double s = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
      double diff = q[t] - y[t];
      s += diff * diff;
    }
    if (s < best) {
      best = s;
      bi = r;
    }
  }
  best_i = bi;
  best_d = std::sqrt(best);
}

void sort_order(const double* v, std::size_t n, std::vector<std::size_t>& order) {
  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
}

void sliced_one(const double* p, const double* q, double& value, double* grad, std::size_t n,
                std::vector<std::size_t>& po, std::vector<std::size_t>& qo) {
  sort_order(p, n, po);
  sort_order(q, n, qo);
  const double inv = 1.0 / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double diff = q[qo[i]] - p[po[i]];
    s += std::abs(diff);
    grad[qo[i]] = diff > 0.0 ? inv : (diff < 0.0 ? -inv : 0.0);
  }
  value = s * inv;
}

}  // namespace

void set_mode(Mode m) { g_mode.store(m); }
Mode mode() { return g_mode.load(); }
int max_threads() { return omp_get_max_threads(); }

namespace serial {

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m, std::size_t k,
          std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) gemm_row(a.data() + i * k, b.data(), c.data() + i * n, k, n);
}

void gemm_atb(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < k; ++i) gemm_atb_row(a.data(), b.data(), c.data() + i * n, i, m, k, n);
}

void gemm_abt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) gemm_abt_row(a.data() + i * n, b.data(), c.data() + i * k, n, k);
}

void nearest(std::span<const double> queries, std::span<const double> refs, std::span<std::size_t> index,
             std::span<double> dist, std::size_t n, std::size_t m, std::size_t d) {
  for (std::size_t i = 0; i < n; ++i) nearest_one(queries.data() + i * d, refs.data(), m, d, index[i], dist[i]);
}

void sliced_w1(std::span<const double> p, std::span<const double> q, std::span<double> value, std::span<double> grad,
               std::size_t np, std::size_t n) {
  std::vector<std::size_t> po, qo;
  for (std::size_t j = 0; j < np; ++j)
    sliced_one(p.data() + j * n, q.data() + j * n, value[j], grad.data() + j * n, n, po, qo);
}

}  // namespace serial

namespace omp {

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m, std::size_t k,
          std::size_t n) {
#pragma omp parallel for schedule(static)
  for (idx i = 0; i < static_cast<idx>(m); ++i)
    gemm_row(a.data() + i * k, b.data(), c.data() + i * n, k, n);
}

void gemm_atb(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (idx i = 0; i < static_cast<idx>(k); ++i)
    gemm_atb_row(a.data(), b.data(), c.data() + i * n, static_cast<std::size_t>(i), m, k, n);
}

void gemm_abt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t n, std::size_t k) {
#pragma omp parallel for schedule(static)
  for (idx i = 0; i < static_cast<idx>(m); ++i)
    gemm_abt_row(a.data() + i * n, b.data(), c.data() + i * k, n, k);
}

void nearest(std::span<const double> queries, std::span<const double> refs, std::span<std::size_t> index,
             std::span<double> dist, std::size_t n, std::size_t m, std::size_t d) {
#pragma omp parallel for schedule(static)
  for (idx i = 0; i < static_cast<idx>(n); ++i)
    nearest_one(queries.data() + i * d, refs.data(), m, d, index[i], dist[i]);
}

void sliced_w1(std::span<const double> p, std::span<const double> q, std::span<double> value, std::span<double> grad,
               std::size_t np, std::size_t n) {
#pragma omp parallel
  {
    std::vector<std::size_t> po, qo;
#pragma omp for schedule(static)
    for (idx j = 0; j < static_cast<idx>(np); ++j)
      sliced_one(p.data() + j * n, q.data() + j * n, value[j], grad.data() + j * n, n, po, qo);
  }
}

}  // namespace omp

#define OW_DISPATCH(name, ...) \
  if (mode() == Mode::Parallel) omp::name(__VA_ARGS__); \
  else serial::name(__VA_ARGS__)

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m, std::size_t k,
          std::size_t n) {
  OW_DISPATCH(gemm, a, b, c, m, k, n);
}
void gemm_atb(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t k, std::size_t n) {
  OW_DISPATCH(gemm_atb, a, b, c, m, k, n);
}
void gemm_abt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t n, std::size_t k) {
  OW_DISPATCH(gemm_abt, a, b, c, m, n, k);
}
void nearest(std::span<const double> queries, std::span<const double> refs, std::span<std::size_t> index,
             std::span<double> dist, std::size_t n, std::size_t m, std::size_t d) {
  OW_DISPATCH(nearest, queries, refs, index, dist, n, m, d);
}
void sliced_w1(std::span<const double> p, std::span<const double> q, std::span<double> value, std::span<double> grad,
               std::size_t np, std::size_t n) {
  OW_DISPATCH(sliced_w1, p, q, value, grad, np, n);
}

#undef OW_DISPATCH

}  // namespace ow::kernels
