#include "openworld/mswg/coverage.hpp"

#include <algorithm>
#include <unordered_set>

#include "openworld/error.hpp"
#include "openworld/kernels.hpp"

namespace ow::mswg {

CoverageResult coverage_penalty(std::span<const double> batch, std::size_t n, std::span<const double> sample,
                                std::size_t m, std::size_t d, std::size_t subsample, Rng* rng) {
  if (n == 0) fail(ErrorCode::EmptyDistribution, "coverage penalty needs a nonempty batch");
  if (m == 0) fail(ErrorCode::EmptySample, "coverage penalty needs a nonempty sample");
  std::vector<double> sub;
  std::span<const double> refs = sample;
  std::size_t mr = m;
  if (subsample > 0 && m > subsample) {
    if (!rng) fail(ErrorCode::Internal, "coverage subsampling requires an rng");
    // Floyd's algorithm: subsample distinct indices, then sorted for a stable layout.
    std::unordered_set<std::size_t> chosen;
    std::vector<std::size_t> picks;
    picks.reserve(subsample);
    for (std::size_t j = m - subsample; j < m; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      std::size_t t = pick(*rng);
      if (!chosen.insert(t).second) {
        chosen.insert(j);
        t = j;
      }
      picks.push_back(t);
    }
    std::sort(picks.begin(), picks.end());
    sub.resize(subsample * d);
    for (std::size_t i = 0; i < subsample; ++i)
      std::copy_n(sample.data() + picks[i] * d, d, sub.data() + i * d);
    refs = sub;
    mr = subsample;
  }
  std::vector<std::size_t> idx(n);
  std::vector<double> dist(n);
  kernels::nearest(batch, refs, idx, dist, n, mr, d);
  CoverageResult out;
  out.grad.assign(n * d, 0.0);
  const double inv = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += dist[i];
    if (dist[i] <= 0.0) continue;
    const double* x = batch.data() + i * d;
    const double* y = refs.data() + idx[i] * d;
    for (std::size_t t = 0; t < d; ++t) out.grad[i * d + t] = inv * (x[t] - y[t]) / dist[i];
  }
  out.value = total * inv;
  return out;
}

}  // namespace ow::mswg
