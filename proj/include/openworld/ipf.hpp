#pragma once

#include <span>
#include <string>
#include <vector>

#include "openworld/catalog.hpp"
#include "openworld/kv_config.hpp"

namespace ow {

enum class ZeroPolicy { Error, DropAndRenormalize };

struct IpfConfig {
  int max_rounds = 1000;
  double tolerance = 1e-6;
  ZeroPolicy zero_policy = ZeroPolicy::DropAndRenormalize;

  void validate() const;
  /// Reads `ipf.{max_rounds,tolerance,zero_policy}` over the current values.
  void apply(const KvConfig& cfg, const std::string& prefix = "ipf.");
};

struct StructuralZeroCell {
  std::size_t marginal = 0;
  std::vector<Value> key;
  double target = 0.0;
};

struct IpfReport {
  int rounds = 0;
  /// Final max relative cell discrepancy per marginal, against the effective
  /// (post-drop) targets.
  std::vector<double> discrepancy;
  bool converged = false;
  std::vector<StructuralZeroCell> structural_zeros;
  /// Target mass removed from each marginal by the drop policy.
  std::vector<double> dropped_mass;

  double max_discrepancy() const;
};

struct IpfResult {
  std::vector<double> weights;
  IpfReport report;
};

/// Round-robin proportional fitting of `initial_weights` to `marginals`
/// (declaration order; one round = one pass over every marginal).
IpfResult ipf_fit(const Table& sample, std::span<const double> initial_weights, const std::vector<Marginal>& marginals,
                  const IpfConfig& cfg = {});
IpfResult ipf_fit(const SampleRelation& sample, const std::vector<Marginal>& marginals, const IpfConfig& cfg = {});

/// max over cells c of |weighted_count(c) - target(c)| / max(target(c), 1e-12).
/// Sample mass falling outside every listed cell counts against a zero target.
double discrepancy(const Table& sample, std::span<const double> weights, const Marginal& marginal);

}  // namespace ow
