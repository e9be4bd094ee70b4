#include "openworld/predicate.hpp"

#include <algorithm>
#include <charconv>

#include "openworld/error.hpp"

namespace ow {

namespace {

double numeric_literal(const sql::Literal& lit, const std::string& attr) {
  if (const double* d = std::get_if<double>(&lit)) return *d;
  const std::string& s = std::get<std::string>(lit);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    fail(ErrorCode::TypeMismatch, "string literal '" + s + "' compared with numeric attribute '" + attr + "'");
  return v;
}

std::string string_literal(const sql::Literal& lit) {
  if (const double* d = std::get_if<double>(&lit)) return format_number(*d);
  return std::get<std::string>(lit);
}

bool compare(double a, sql::CompareOp op, double b) {
  switch (op) {
    case sql::CompareOp::Eq: return a == b;
    case sql::CompareOp::Lt: return a < b;
    case sql::CompareOp::Gt: return a > b;
    case sql::CompareOp::Le: return a <= b;
    case sql::CompareOp::Ge: return a >= b;
  }
  return false;
}

bool compare(const std::string& a, sql::CompareOp op, const std::string& b) {
  int c = a.compare(b);
  switch (op) {
    case sql::CompareOp::Eq: return c == 0;
    case sql::CompareOp::Lt: return c < 0;
    case sql::CompareOp::Gt: return c > 0;
    case sql::CompareOp::Le: return c <= 0;
    case sql::CompareOp::Ge: return c >= 0;
  }
  return false;
}

}  // namespace

BoundPredicate::BoundPredicate(const sql::Predicate& pred, const Table& table) : table_(&table) {
  for (const auto& atom : pred.atoms) {
    const std::string& attr = sql::atom_attribute(atom);
    auto col = table.column_index(attr);
    if (!col) fail(ErrorCode::UnknownAttribute, "predicate refers to unknown attribute '" + attr + "'");
    const AttributeDef& def = table.schema()[*col];
    Term t;
    t.column = *col;
    t.categorical = def.is_categorical();
    if (const auto* in = std::get_if<sql::InList>(&atom)) {
      t.is_in = true;
      for (const auto& lit : in->values) {
        if (t.categorical) {
          int code = def.code_of(string_literal(lit));
          if (code >= 0) t.set.push_back(code);
        } else {
          t.set.push_back(numeric_literal(lit, attr));
        }
      }
    } else {
      const auto& cmp = std::get<sql::Comparison>(atom);
      t.op = cmp.op;
      if (t.categorical) {
        std::string lit = string_literal(cmp.value);
        t.code_satisfies.resize(def.domain.size());
        for (std::size_t c = 0; c < def.domain.size(); ++c) t.code_satisfies[c] = compare(def.domain[c], cmp.op, lit);
      } else {
        t.number = numeric_literal(cmp.value, attr);
      }
    }
    terms_.push_back(std::move(t));
  }
}

bool BoundPredicate::matches(std::size_t row) const {
  for (const auto& t : terms_) {
    double v = table_->raw(row, t.column);
    if (is_missing(v)) return false;
    if (t.is_in) {
      if (std::find(t.set.begin(), t.set.end(), v) == t.set.end()) return false;
    } else if (t.categorical) {
      auto code = static_cast<std::size_t>(v);
      if (code >= t.code_satisfies.size() || !t.code_satisfies[code]) return false;
    } else if (!compare(v, t.op, t.number)) {
      return false;
    }
  }
  return true;
}

std::vector<char> BoundPredicate::mask() const {
  std::vector<char> out(table_->rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = matches(r) ? 1 : 0;
  return out;
}

std::vector<char> evaluate_predicate(const sql::Predicate& pred, const Table& table) {
  return BoundPredicate(pred, table).mask();
}

}  // namespace ow
