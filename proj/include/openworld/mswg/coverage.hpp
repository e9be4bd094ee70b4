#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "openworld/mswg/projections.hpp"

namespace ow::mswg {

struct CoverageResult {
  double value = 0.0;
  std::vector<double> grad;  // n x d, d(value)/d(batch)
};

/// Mean Euclidean distance from each batch row (n x d) to its nearest sample
/// row (m x d). When m exceeds `subsample`, a uniform subsample of that size is
/// drawn from `rng`; subsample = 0 always uses every sample row.
CoverageResult coverage_penalty(std::span<const double> batch, std::size_t n, std::span<const double> sample,
                                std::size_t m, std::size_t d, std::size_t subsample, Rng* rng);

}  // namespace ow::mswg
