#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "openworld/ast.hpp"
#include "openworld/table.hpp"

namespace ow {

/// Equi-width bins over [min, max]; values outside clamp to the edge bins.
struct Binning {
  double min = 0.0;
  double max = 1.0;
  int bins = 64;

  int bin_of(double value, bool* clamped = nullptr) const;
  double midpoint(int bin) const;
  double lower(int bin) const;
  double width() const { return (max - min) / bins; }
  bool operator==(const Binning&) const = default;
};

inline constexpr int kDefaultBins = 64;

struct MarginalCell {
  /// One component per marginal attribute: the category string, the integer
  /// value, or the bin index when the attribute is binned.
  std::vector<Value> key;
  double count = 0.0;
  bool operator==(const MarginalCell&) const = default;
};

/// 1- or 2-attribute histogram of population counts.
struct Marginal {
  std::string name;
  std::string owner;
  std::vector<std::string> attributes;
  std::vector<AttributeKind> kinds;
  std::vector<std::optional<Binning>> binning;
  std::vector<MarginalCell> cells;

  std::size_t dimension() const { return attributes.size(); }
  double total() const;
  /// Numeric coordinate of a key component: bin midpoint or the value itself.
  double numeric_coordinate(std::size_t attr, const Value& key) const;
  bool operator==(const Marginal&) const = default;
};

/// Cell key of `row` of `table` under `marginal`. Numeric values outside a
/// binning range clamp to the boundary bin; with `strict` they raise
/// OutOfDomain instead.
std::vector<Value> cell_of(const Table& table, std::size_t row, const Marginal& marginal,
                           std::span<const std::size_t> columns, bool strict = false);
std::vector<Value> cell_of(const Table& table, std::size_t row, const Marginal& marginal, bool strict = false);

/// Builds a marginal by counting (or summing `weights` over) the rows of a
/// table. Numeric attributes use integer cells when every value is whole,
/// otherwise `bins` equi-width bins over the observed range.
Marginal marginal_from_table(const Table& table, std::string name, std::string owner,
                             std::vector<std::string> attributes, std::span<const double> weights = {},
                             int bins = kDefaultBins);

struct PopulationDef {
  std::string name;
  bool is_global = false;
  std::string source;  // empty iff global
  sql::Predicate predicate;
  Schema schema;
  bool schema_declared = false;
  bool operator==(const PopulationDef&) const = default;
};

struct SampleRelation {
  std::string name;
  std::string source;
  std::vector<std::string> view_columns;  // empty = all attributes
  sql::Predicate predicate;
  std::optional<sql::Mechanism> mechanism;
  bool schema_declared = false;
  Table data;
  std::vector<double> weights;

  std::size_t rows() const { return data.rows(); }
  bool operator==(const SampleRelation&) const = default;
};

struct AuxTable {
  std::string name;
  bool temporary = false;
  bool schema_declared = false;
  Table data;
  bool operator==(const AuxTable&) const = default;
};

struct CatalogState {
  std::vector<PopulationDef> populations;
  std::vector<SampleRelation> samples;
  std::vector<Marginal> marginals;
  std::vector<AuxTable> tables;
  std::uint64_t seed = 42;
  bool operator==(const CatalogState&) const = default;
};

/// Owns the catalog state and enforces its invariants. Single writer.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(CatalogState state);

  const CatalogState& state() const { return state_; }
  std::uint64_t seed() const { return state_.seed; }
  void set_seed(std::uint64_t seed) { state_.seed = seed; }

  void create_population(PopulationDef def);
  void create_population(const sql::CreatePopulation& stmt);
  void create_sample(const std::string& name, std::vector<sql::ColumnDef> columns, const sql::ViewDef& view,
                     std::optional<sql::Mechanism> mechanism);
  void create_sample(const sql::CreateSample& stmt);
  void create_table(const sql::CreateTable& stmt);
  void create_metadata(const std::string& owner, std::vector<std::string> attributes,
                       std::vector<MarginalCell> cells, std::string name = {},
                       std::vector<std::optional<Binning>> binning = {});
  void add_marginal(Marginal marginal);
  /// Evaluates the metadata query against an auxiliary table.
  void create_metadata(const sql::CreateMetadata& stmt);

  std::size_t ingest_rows(const std::string& target, const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows, int first_line = 2);
  std::size_t ingest_csv(const std::string& target, const std::string& path);
  /// Appends rows of a table whose columns are matched to the target by name.
  std::size_t ingest_table(const std::string& target, const Table& rows);

  void set_weights(const std::string& sample, std::vector<double> weights);

  const PopulationDef* find_population(std::string_view name) const;
  const PopulationDef& global_population() const;
  bool has_global() const;
  const SampleRelation* find_sample(std::string_view name) const;
  const AuxTable* find_table(std::string_view name) const;
  std::vector<const Marginal*> marginals_of(std::string_view owner) const;
  /// Population owning a metadata object named `name` (exact or `<pop>_suffix`).
  std::string resolve_metadata_owner(std::string_view name) const;

  /// Throws on any broken invariant.
  void validate() const;

  void save(const std::string& path) const;
  static Catalog load(const std::string& path);

 private:
  bool name_taken(std::string_view name) const;
  PopulationDef& global_mut();
  SampleRelation* find_sample_mut(std::string_view name);
  AuxTable* find_table_mut(std::string_view name);
  void check_predicate(const sql::Predicate& pred, const Schema& schema, bool schema_open) const;
  /// Ensures the GP knows `def`; open GP schemas grow, declared ones must match.
  void register_gp_attribute(const AttributeDef& def);
  std::size_t append_typed(Table& table, bool& schema_fixed, const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows, std::span<const int> lines,
                           bool reject_missing);
  std::size_t ingest_lines(const std::string& target, const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows, std::span<const int> lines);

  CatalogState state_;
};

std::string serialize_catalog(const CatalogState& state);
CatalogState deserialize_catalog(std::string_view text);

}  // namespace ow
