#include "openworld/mswg/projections.hpp"

#include <cmath>

#include "openworld/error.hpp"

namespace ow::mswg {

ProjectionSet sample_projections(std::size_t p, std::size_t k, Rng& rng) {
  if (p < 1) fail(ErrorCode::ConfigError, "projection count must be >= 1");
  if (k < 1) fail(ErrorCode::ConfigError, "projection dimension must be >= 1");
  ProjectionSet set{p, k, std::vector<double>(p * k)};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < p; ++i) {
    double* w = set.directions.data() + i * k;
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        w[t] = normal(rng);
        norm += w[t] * w[t];
      }
    } while (norm < 1e-24);
    norm = std::sqrt(norm);
    for (std::size_t t = 0; t < k; ++t) w[t] /= norm;
  }
  return set;
}

}  // namespace ow::mswg
