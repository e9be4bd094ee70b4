#include "openworld/table.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>

#include "openworld/error.hpp"

namespace ow {

std::string_view to_string(AttributeKind kind) {
  return kind == AttributeKind::Numeric ? "numeric" : "categorical";
}

int AttributeDef::code_of(std::string_view value) const {
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == value) return static_cast<int>(i);
  return -1;
}

int AttributeDef::intern(std::string_view value) {
  int code = code_of(value);
  if (code >= 0) return code;
  domain.emplace_back(value);
  return static_cast<int>(domain.size() - 1);
}

std::optional<std::size_t> find_attribute(const Schema& schema, std::string_view name) {
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i].name == name) return i;
  return std::nullopt;
}

const AttributeDef* find_attribute_def(const Schema& schema, std::string_view name) {
  auto idx = find_attribute(schema, name);
  return idx ? &schema[*idx] : nullptr;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string format_value(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return format_number(*d);
  return std::get<std::string>(v);
}

bool value_less(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const double* da = std::get_if<double>(&a)) return *da < std::get<double>(b);
  return std::get<std::string>(a) < std::get<std::string>(b);
}

Table::Table(Schema schema) : schema_(std::move(schema)), columns_(schema_.size()) {}

Value Table::value(std::size_t row, std::size_t col) const {
  double r = columns_[col][row];
  if (schema_[col].is_numeric()) return r;
  if (is_missing(r)) return std::string{};
  return schema_[col].domain[static_cast<std::size_t>(r)];
}

void Table::append_row(std::span<const Value> values) {
  if (values.size() != schema_.size())
    fail(ErrorCode::TypeMismatch, "row has " + std::to_string(values.size()) + " values, expected " +
                                      std::to_string(schema_.size()));
  for (std::size_t c = 0; c < values.size(); ++c) {
    const Value& v = values[c];
    if (schema_[c].is_numeric()) {
      const double* d = std::get_if<double>(&v);
      if (!d) fail(ErrorCode::TypeMismatch, "non-numeric value for numeric attribute '" + schema_[c].name + "'");
      columns_[c].push_back(*d);
    } else {
      const std::string* s = std::get_if<std::string>(&v);
      if (!s) fail(ErrorCode::TypeMismatch, "numeric value for categorical attribute '" + schema_[c].name + "'");
      columns_[c].push_back(s->empty() ? kMissing : static_cast<double>(schema_[c].intern(*s)));
    }
  }
  ++rows_;
}

void Table::append_raw(std::span<const double> raw) {
  if (raw.size() != schema_.size()) fail(ErrorCode::Internal, "raw row width mismatch");
  for (std::size_t c = 0; c < raw.size(); ++c) columns_[c].push_back(raw[c]);
  ++rows_;
}

void Table::reserve(std::size_t rows) {
  for (auto& col : columns_) col.reserve(rows);
}

void Table::add_column(AttributeDef def) {
  schema_.push_back(std::move(def));
  columns_.emplace_back(rows_, kMissing);
}

Table Table::select_columns(std::span<const std::string> names) const {
  Schema schema;
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto i = column_index(n);
    if (!i) fail(ErrorCode::UnknownAttribute, "no attribute '" + n + "'");
    idx.push_back(*i);
    schema.push_back(schema_[*i]);
  }
  Table out(std::move(schema));
  for (std::size_t k = 0; k < idx.size(); ++k) out.columns_[k] = columns_[idx[k]];
  out.rows_ = rows_;
  return out;
}

Table Table::filter_rows(std::span<const char> keep) const {
  Table out(schema_);
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    auto& dst = out.columns_[c];
    for (std::size_t r = 0; r < rows_; ++r)
      if (keep[r]) dst.push_back(columns_[c][r]);
  }
  out.rows_ = static_cast<std::size_t>(std::count_if(keep.begin(), keep.begin() + static_cast<std::ptrdiff_t>(rows_),
                                                     [](char k) { return k != 0; }));
  return out;
}

bool Table::operator==(const Table& other) const {
  if (rows_ != other.rows_ || schema_ != other.schema_) return false;
  for (std::size_t c = 0; c < columns_.size(); ++c)
    for (std::size_t r = 0; r < rows_; ++r) {
      double a = columns_[c][r], b = other.columns_[c][r];
      if (std::isnan(a) && std::isnan(b)) continue;
      if (std::memcmp(&a, &b, sizeof a) != 0) return false;
    }
  return true;
}

}  // namespace ow
