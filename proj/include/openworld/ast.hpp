#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "openworld/error.hpp"
#include "openworld/table.hpp"

namespace ow::sql {

enum class Visibility { Closed, SemiOpen, Open };
std::string_view to_string(Visibility v);

enum class CompareOp { Eq, Lt, Gt, Le, Ge };
std::string_view to_string(CompareOp op);

using Literal = Value;

struct Comparison {
  std::string attribute;
  CompareOp op = CompareOp::Eq;
  Literal value;
  bool operator==(const Comparison&) const = default;
};

struct InList {
  std::string attribute;
  std::vector<Literal> values;
  bool operator==(const InList&) const = default;
};

using Atom = std::variant<Comparison, InList>;

const std::string& atom_attribute(const Atom& atom);

/// Conjunction of atoms; empty means TRUE.
struct Predicate {
  std::vector<Atom> atoms;
  bool empty() const { return atoms.empty(); }
  std::vector<std::string> attributes() const;
  bool operator==(const Predicate&) const = default;
};

enum class MechanismKind { Uniform, Stratified };

struct Mechanism {
  MechanismKind kind = MechanismKind::Uniform;
  std::string strat_attribute;  // stratified only
  double percent = 100.0;
  double inclusion_probability() const { return percent / 100.0; }
  bool operator==(const Mechanism&) const = default;
};

struct ColumnDef {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  bool operator==(const ColumnDef&) const = default;
};

/// `SELECT cols FROM source [WHERE pred]` used inside CREATE ... AS (...).
struct ViewDef {
  bool star = true;
  std::vector<std::string> columns;
  std::string source;
  Predicate where;
  bool operator==(const ViewDef&) const = default;
};

struct CreateTable {
  std::string name;
  bool temporary = false;
  std::vector<ColumnDef> columns;
  bool operator==(const CreateTable&) const = default;
};

struct CreatePopulation {
  std::string name;
  bool global = false;
  std::vector<ColumnDef> columns;
  std::optional<ViewDef> view;
  bool operator==(const CreatePopulation&) const = default;
};

struct CreateSample {
  std::string name;
  std::vector<ColumnDef> columns;
  ViewDef view;
  std::optional<Mechanism> mechanism;
  bool operator==(const CreateSample&) const = default;
};

/// `CREATE METADATA name AS (SELECT A [, B], COUNT(*) | count_col FROM aux ...)`.
/// An empty `count_column` means COUNT(*).
struct CreateMetadata {
  std::string name;
  std::vector<std::string> attributes;
  std::string count_column;
  std::string source;
  Predicate where;
  std::vector<std::string> group_by;
  bool operator==(const CreateMetadata&) const = default;
};

struct Ingest {
  std::string relation;
  std::string path;
  bool operator==(const Ingest&) const = default;
};

enum class AggregateFn { CountStar, Sum, Avg };

struct Aggregate {
  AggregateFn fn = AggregateFn::CountStar;
  std::string argument;  // empty for COUNT(*)
  bool operator==(const Aggregate&) const = default;
};

struct AttributeRef {
  std::string name;
  bool operator==(const AttributeRef&) const = default;
};

using SelectItem = std::variant<AttributeRef, Aggregate>;

struct SelectQuery {
  Visibility visibility = Visibility::Closed;
  bool star = false;
  std::vector<SelectItem> items;
  std::string source;
  Predicate where;
  std::vector<std::string> group_by;

  bool has_aggregates() const;
  /// Every attribute the query reads, deduplicated in first-use order.
  std::vector<std::string> referenced_attributes() const;
  bool operator==(const SelectQuery&) const = default;
};

using StatementBody = std::variant<CreateTable, CreatePopulation, CreateSample, CreateMetadata, Ingest, SelectQuery>;

struct SourceSpan {
  SourceLocation start;
  std::size_t begin = 0;  // byte offsets into the parsed text
  std::size_t end = 0;
};

struct Statement {
  StatementBody body;
  SourceSpan span;
};

std::string aggregate_label(const Aggregate& agg);

}  // namespace ow::sql
