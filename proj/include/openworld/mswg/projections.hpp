#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace ow::mswg {

using Rng = std::mt19937_64;

/// p unit directions in R^k, stored row-major (p x k).
struct ProjectionSet {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> directions;

  std::span<const double> direction(std::size_t i) const { return {directions.data() + i * dim, dim}; }
};

/// Normalized standard-normal directions. Requires p >= 1 and k >= 1.
ProjectionSet sample_projections(std::size_t p, std::size_t k, Rng& rng);

}  // namespace ow::mswg
