#pragma once

#include <string>
#include <vector>

#include "openworld/catalog.hpp"
#include "openworld/mswg/encoding.hpp"
#include "openworld/mswg/projections.hpp"

namespace ow::mswg {

/// Adds a 1-D sample marginal for every sample attribute that no population
/// marginal covers, rescaled to the population total. Population marginals
/// over attributes the sample lacks are dropped.
std::vector<Marginal> augment_marginals(const std::vector<Marginal>& population, const Table& sample);

/// A marginal in encoded space: cell points over the participating encoded
/// columns, carrying normalized cell probabilities.
struct PreparedMarginal {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<double> points;  // cells x k
  std::vector<double> mass;
  std::vector<double> cdf;
  std::vector<double> bin_width;  // per dim, encoded units; 0 when not binned

  std::size_t k() const { return dims.size(); }
  std::size_t cells() const { return mass.size(); }
  bool sliced() const { return dims.size() > 1; }
};

PreparedMarginal prepare_marginal(const Marginal& marginal, const Encoding& encoding);

/// Weighted point set the generated batch is compared against.
struct TransportTarget {
  std::vector<double> points;   // count x k
  std::vector<double> weights;  // empty = uniform
  std::size_t count = 0;
};

TransportTarget exact_target(const PreparedMarginal& m);
/// `n` i.i.d. draws from the marginal's cell distribution, unit weights;
/// binned coordinates are spread uniformly within their bin.
TransportTarget resample_target(const PreparedMarginal& m, std::size_t n, Rng& rng);

}  // namespace ow::mswg
