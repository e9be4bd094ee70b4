#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "openworld/ast.hpp"
#include "openworld/catalog.hpp"
#include "openworld/kv_config.hpp"
#include "openworld/table.hpp"

namespace ow::bench {

inline constexpr double kPi = 3.14159265358979323846;

struct SpiralSpec {
  std::size_t population = 100000;
  int arms = 2;
  double theta_min = 0.25 * kPi;
  double theta_max = 4.0 * kPi;
  double b = 1.0;
  double sigma = 0.25;
  double gamma = 2.0;
  std::size_t sample_size = 10000;
  std::uint64_t seed = 42;

  void validate() const;
  void apply(const KvConfig& cfg, const std::string& prefix = "spiral.");
};

struct SpiralData {
  Table population;  // columns x, y
  Table sample;
  std::vector<double> theta;              // per population row
  std::vector<std::size_t> sample_rows;   // population row of each sample row
};

/// Population points (b*theta*cos(theta + phase) + noise, ...) with arm phases
/// spread evenly over the circle; the sample is drawn without replacement with
/// inclusion weight proportional to theta^gamma.
SpiralData gen_spiral(const SpiralSpec& spec);

struct RangeQuerySpec {
  double coverage = 0.8;
  std::size_t count = 100;
  std::uint64_t seed = 42;
  void validate() const;
};

struct BoxQuery {
  std::vector<std::string> attributes;
  std::vector<double> lo, hi;

  sql::Predicate predicate() const;
  bool contains(const Table& t, std::span<const std::size_t> cols, std::size_t row) const;
};

/// Boxes spanning `coverage` of each numeric attribute's data range, placed
/// uniformly at random inside the range.
std::vector<BoxQuery> gen_range_queries(const Table& population, const RangeQuerySpec& spec);

/// Weighted count of rows in the box; empty weights mean unit weights.
double box_count(const Table& t, const BoxQuery& q, std::span<const double> weights = {});

struct FlightsLikeSpec {
  std::size_t population = 426411;
  double bias_threshold = 200.0;
  double bias_rate = 0.95;
  double sample_fraction = 0.05;
  std::uint64_t seed = 42;

  void validate() const;
  void apply(const KvConfig& cfg, const std::string& prefix = "flights.");
};

struct FlightsData {
  Table population;  // C (categorical), O, I, E, D
  Table sample;
  std::vector<Marginal> marginals;  // (C,E), (O,E), (I,E), (D,E)
};

/// Carrier names in decreasing popularity, except the rare US and F9.
const std::vector<std::string>& flight_carriers();

FlightsData gen_flightslike(const FlightsLikeSpec& spec);

/// Rows sampled without replacement with probability proportional to weight
/// (Efraimidis-Spirakis keys), returned in ascending row order.
std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> weights, std::size_t k,
                                                             std::uint64_t seed);

}  // namespace ow::bench
