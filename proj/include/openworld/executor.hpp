#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "openworld/ast.hpp"
#include "openworld/catalog.hpp"
#include "openworld/ipf.hpp"
#include "openworld/mswg/trainer.hpp"

namespace ow {

enum class Provenance { Closed, SemiOpenMechanism, SemiOpenIpfDirect, SemiOpenIpfGlobal, Open };
std::string_view to_string(Provenance p);

struct GenerationStats {
  std::size_t samples = 0;
  std::size_t rows_per_sample = 0;
  double weight = 0.0;
  bool cached = false;
  double best_loss = 0.0;
  std::size_t epochs = 0;
};

struct QueryAnswer {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  std::vector<std::size_t> key_columns;  // columns holding the group-by attributes
  bool aggregate = false;
  Provenance provenance = Provenance::Closed;
  /// Open non-aggregate answers are a generated sample, not a population answer.
  bool materialized = false;
  std::string sample;
  std::optional<IpfReport> ipf;
  std::optional<GenerationStats> generation;

  /// Group-key values of each row, in row order.
  std::vector<std::vector<Value>> keys() const;
};

/// Rows plus nonnegative per-row weights.
struct WeightedRows {
  const Table* table = nullptr;
  std::vector<double> weights;
};

enum class MetadataPath { None, QueryPopulation, Global };

struct Plan {
  const PopulationDef* population = nullptr;
  const SampleRelation* sample = nullptr;
  /// Conjunction of population view predicates from the query population up to the GP.
  sql::Predicate view;
  MetadataPath path = MetadataPath::None;
  std::vector<Marginal> marginals;  // usable on the chosen sample
  double population_size = 0.0;     // from the marginals, 0 when unknown
};

struct ExecOptions {
  IpfConfig ipf;
  bool ipf_enabled = true;
  mswg::TrainConfig train;
  std::size_t open_samples = 10;
  std::uint64_t seed = 42;
  mswg::ProgressFn progress;
};

Plan plan(const sql::SelectQuery& query, const Catalog& catalog);

/// Filters by `where`, then groups and aggregates with the given weights:
/// COUNT(*) = sum w, SUM(A) = sum w*A, AVG(A) = SUM/COUNT over rows with A present.
/// Unless keep_zero_groups, groups whose total weight is 0 are dropped. A
/// query without GROUP BY always yields one row (COUNT 0, AVG missing when empty).
QueryAnswer aggregate(const sql::SelectQuery& query, const WeightedRows& rows, bool keep_zero_groups,
                      bool weight_column);

/// Inverse inclusion-probability weights for a sample with a declared mechanism.
std::vector<double> mechanism_weights(const SampleRelation& sample, const Catalog& catalog);

class Executor {
 public:
  Executor(const Catalog& catalog, ExecOptions options);

  ExecOptions& options() { return options_; }
  const ExecOptions& options() const { return options_; }

  QueryAnswer execute(const sql::SelectQuery& query);
  QueryAnswer execute_closed(const sql::SelectQuery& query, const Plan& plan) const;
  QueryAnswer execute_semi_open(const sql::SelectQuery& query, const Plan& plan) const;
  QueryAnswer execute_open(const sql::SelectQuery& query, const Plan& plan);

  /// Trains (or returns the cached) generator for the plan's sample and metadata.
  std::shared_ptr<const mswg::Generator> generator_for(const Plan& plan, bool force_retrain = false,
                                                       bool* was_cached = nullptr);
  /// Forces training for `sample` against the global metadata.
  std::shared_ptr<const mswg::Generator> retrain(const std::string& sample);
  void clear_cache() { cache_.clear(); }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  const Catalog* catalog_;
  ExecOptions options_;
  std::map<std::uint64_t, std::shared_ptr<const mswg::Generator>> cache_;
};

/// Aligned text table with a provenance footer.
std::string format_table(const QueryAnswer& answer);
/// CSV with a header row.
std::string format_csv(const QueryAnswer& answer);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace ow
