#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ow::bench {

/// 100 * |estimate - truth| / |truth|. When truth is 0 the result is 0 for a
/// zero estimate and nullopt (excluded from averages) otherwise.
std::optional<double> percent_difference(double estimate, double truth);

/// Linear-interpolation percentile of sorted values, q in [0, 100].
double percentile(std::span<const double> sorted, double q);

struct Summary {
  double mean = 0.0;
  double p3 = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, p97 = 0.0;
  std::size_t count = 0;
  std::size_t excluded = 0;
  bool operator==(const Summary&) const = default;
};

/// All statistics are NaN when `values` is empty.
Summary summarize(std::vector<double> values, std::size_t excluded = 0);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::span<const double> a, std::span<const double> b);

}  // namespace ow::bench
