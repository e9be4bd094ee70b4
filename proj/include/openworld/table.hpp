#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ow {

enum class AttributeKind { Numeric, Categorical };

std::string_view to_string(AttributeKind kind);

struct NumericRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const NumericRange&) const = default;
};

/// A column description. Categorical values are stored in tables as integer
/// codes into `domain`, which keeps first-appearance order.
struct AttributeDef {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  std::vector<std::string> domain;
  std::optional<NumericRange> range;

  bool is_numeric() const { return kind == AttributeKind::Numeric; }
  bool is_categorical() const { return kind == AttributeKind::Categorical; }
  int code_of(std::string_view value) const;
  int intern(std::string_view value);

  bool operator==(const AttributeDef&) const = default;
};

using Schema = std::vector<AttributeDef>;

std::optional<std::size_t> find_attribute(const Schema& schema, std::string_view name);
const AttributeDef* find_attribute_def(const Schema& schema, std::string_view name);

/// Cell value as seen by users: a real for numeric columns, a string for
/// categorical ones.
using Value = std::variant<double, std::string>;

inline bool is_missing(double raw) { return std::isnan(raw); }
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Shortest round-trip decimal rendering of a real.
std::string format_number(double x);
std::string format_value(const Value& v);
bool value_less(const Value& a, const Value& b);

/// Column-major relation. Missing values are NaN in both numeric and
/// categorical columns.
class Table {
 public:
  Table() = default;
  explicit Table(Schema schema);

  const Schema& schema() const { return schema_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return schema_.size(); }

  double raw(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::span<const double> column(std::size_t col) const { return columns_[col]; }
  Value value(std::size_t row, std::size_t col) const;
  std::optional<std::size_t> column_index(std::string_view name) const {
    return find_attribute(schema_, name);
  }

  /// Appends a row of user values, interning unseen categorical values.
  void append_row(std::span<const Value> values);
  /// Appends a row of raw storage values (codes for categorical columns).
  void append_raw(std::span<const double> raw);
  void reserve(std::size_t rows);

  /// Adds a column filled with missing values.
  void add_column(AttributeDef def);
  /// Registers a categorical value without adding a row; returns its code.
  int intern(std::size_t col, std::string_view value) { return schema_[col].intern(value); }
  void set_range(std::size_t col, std::optional<NumericRange> range) { schema_[col].range = range; }

  /// Projection onto the named columns in the given order.
  Table select_columns(std::span<const std::string> names) const;
  /// Rows whose mask entry is true.
  Table filter_rows(std::span<const char> keep) const;

  /// Exact equality; NaN cells compare equal to NaN cells.
  bool operator==(const Table& other) const;

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::size_t rows_ = 0;
};

}  // namespace ow
