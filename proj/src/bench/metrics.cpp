#include "openworld/bench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "openworld/error.hpp"

namespace ow::bench {

std::optional<double> percent_difference(double estimate, double truth) {
  if (truth == 0.0) {
    if (estimate == 0.0) return 0.0;
    return std::nullopt;
  }
  return 100.0 * std::abs(estimate - truth) / std::abs(truth);
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::vector<double> values, std::size_t excluded) {
  Summary s;
  s.count = values.size();
  s.excluded = excluded;
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean = s.p3 = s.q1 = s.median = s.q3 = s.p97 = nan;
    return s;
  }
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.p3 = percentile(values, 3);
  s.q1 = percentile(values, 25);
  s.median = percentile(values, 50);
  s.q3 = percentile(values, 75);
  s.p97 = percentile(values, 97);
  return s;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptyDistribution, "KS statistic needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

}  // namespace ow::bench
