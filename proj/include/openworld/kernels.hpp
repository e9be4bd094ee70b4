#pragma once

#include <cstddef>
#include <span>

// Dense numeric kernels used by the generator. Each kernel has a serial
// reference and an OpenMP version; both partition the work by output element
// and keep every inner summation order identical, so results are bitwise equal.
namespace ow::kernels {

enum class Mode { Serial, Parallel };

void set_mode(Mode mode);
Mode mode();
/// Threads the parallel kernels would use.
int max_threads();

// All matrices are row-major.
//   gemm     : C[m x n]  = A[m x k] * B[k x n]
//   gemm_atb : C[k x n]  = A[m x k]^T * B[m x n]
//   gemm_abt : C[m x k]  = A[m x n] * B[k x n]^T
// For each query point, index and Euclidean distance of its nearest reference.
//   nearest  : queries[n x d], refs[m x d] -> index[n], dist[n]
// Equal-size sliced transport: for projection j, sorts p[j] and q[j] (each of
// length n), writes mean |p_(i) - q_(i)| to value[j] and
// sign(q - matched p) / n into grad[j] (in q's original order).
//   sliced_w1: p[np x n], q[np x n] -> value[np], grad[np x n]

namespace serial {
void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m, std::size_t k,
          std::size_t n);
void gemm_atb(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t k, std::size_t n);
void gemm_abt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t n, std::size_t k);
void nearest(std::span<const double> queries, std::span<const double> refs, std::span<std::size_t> index,
             std::span<double> dist, std::size_t n, std::size_t m, std::size_t d);
void sliced_w1(std::span<const double> p, std::span<const double> q, std::span<double> value, std::span<double> grad,
               std::size_t np, std::size_t n);
}  // namespace serial

namespace omp {
void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m, std::size_t k,
          std::size_t n);
void gemm_atb(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t k, std::size_t n);
void gemm_abt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t n, std::size_t k);
void nearest(std::span<const double> queries, std::span<const double> refs, std::span<std::size_t> index,
             std::span<double> dist, std::size_t n, std::size_t m, std::size_t d);
void sliced_w1(std::span<const double> p, std::span<const double> q, std::span<double> value, std::span<double> grad,
               std::size_t np, std::size_t n);
}  // namespace omp

// Dispatch on mode().
void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m, std::size_t k,
          std::size_t n);
void gemm_atb(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t k, std::size_t n);
void gemm_abt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
              std::size_t n, std::size_t k);
void nearest(std::span<const double> queries, std::span<const double> refs, std::span<std::size_t> index,
             std::span<double> dist, std::size_t n, std::size_t m, std::size_t d);
void sliced_w1(std::span<const double> p, std::span<const double> q, std::span<double> value, std::span<double> grad,
               std::size_t np, std::size_t n);

}  // namespace ow::kernels
