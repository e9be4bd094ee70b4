#include "openworld/mswg/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "openworld/error.hpp"

namespace ow::mswg {

Encoding::Encoding(std::vector<EncodedAttribute> attributes) : attrs_(std::move(attributes)) {
  dim_ = 0;
  for (auto& a : attrs_) {
    a.offset = dim_;
    a.width = a.kind == AttributeKind::Numeric ? 1 : a.categories.size();
    if (a.kind == AttributeKind::Categorical && a.width == 0)
      fail(ErrorCode::EmptySample, "categorical attribute '" + a.name + "' has no values to encode");
    dim_ += a.width;
  }
}

Encoding Encoding::build(const Table& sample, const std::vector<Marginal>& marginals) {
  std::vector<EncodedAttribute> attrs;
  for (std::size_t c = 0; c < sample.cols(); ++c) {
    const AttributeDef& def = sample.schema()[c];
    EncodedAttribute ea;
    ea.name = def.name;
    ea.kind = def.kind;
    if (def.is_numeric()) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      bool whole = true;
      for (double v : sample.column(c)) {
        if (is_missing(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        whole = whole && v == std::floor(v);
      }
      for (const auto& m : marginals) {
        for (std::size_t a = 0; a < m.attributes.size(); ++a) {
          if (m.attributes[a] != def.name) continue;
          if (m.binning[a]) {
            lo = std::min(lo, m.binning[a]->min);
            hi = std::max(hi, m.binning[a]->max);
            whole = false;
            continue;
          }
          for (const auto& cell : m.cells) {
            double v = m.numeric_coordinate(a, cell.key[a]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            whole = whole && v == std::floor(v);
          }
        }
      }
      if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
      if (!(hi > lo)) hi = lo + 1.0;
      ea.min = lo;
      ea.max = hi;
      ea.integral = whole;
    } else {
      std::vector<char> used(def.domain.size(), 0);
      for (double v : sample.column(c))
        if (!is_missing(v)) used[static_cast<std::size_t>(v)] = 1;
      for (std::size_t i = 0; i < def.domain.size(); ++i)
        if (used[i]) ea.categories.push_back(def.domain[i]);
      for (const auto& m : marginals)
        for (std::size_t a = 0; a < m.attributes.size(); ++a) {
          if (m.attributes[a] != def.name) continue;
          for (const auto& cell : m.cells) {
            const auto* s = std::get_if<std::string>(&cell.key[a]);
            if (s && std::find(ea.categories.begin(), ea.categories.end(), *s) == ea.categories.end())
              ea.categories.push_back(*s);
          }
        }
    }
    attrs.push_back(std::move(ea));
  }
  return Encoding(std::move(attrs));
}

std::optional<std::size_t> Encoding::find(std::string_view name) const {
  for (std::size_t i = 0; i < attrs_.size(); ++i)
    if (attrs_[i].name == name) return i;
  return std::nullopt;
}

double Encoding::encode_numeric(std::size_t attr, double value) const {
  const auto& a = attrs_[attr];
  return (value - a.min) / (a.max - a.min);
}

double Encoding::decode_numeric(std::size_t attr, double x) const {
  const auto& a = attrs_[attr];
  double v = a.min + x * (a.max - a.min);
  return a.integral ? std::round(v) : v;
}

std::size_t Encoding::category_index(std::size_t attr, std::string_view value) const {
  const auto& cats = attrs_[attr].categories;
  auto it = std::find(cats.begin(), cats.end(), value);
  if (it == cats.end())
    fail(ErrorCode::OutOfDomain, "value '" + std::string(value) + "' is not in the encoding of '" +
                                     attrs_[attr].name + "'");
  return static_cast<std::size_t>(it - cats.begin());
}

std::vector<double> Encoding::encode(const Table& table) const {
  std::vector<std::size_t> cols;
  for (const auto& a : attrs_) {
    auto c = table.column_index(a.name);
    if (!c) fail(ErrorCode::UnknownAttribute, "table lacks encoded attribute '" + a.name + "'");
    cols.push_back(*c);
  }
  std::vector<double> out(table.rows() * dim_, 0.0);
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    const auto& a = attrs_[i];
    const auto& def = table.schema()[cols[i]];
    if (def.kind != a.kind) fail(ErrorCode::TypeMismatch, "attribute '" + a.name + "' kind differs from encoding");
    std::vector<std::size_t> remap;
    if (a.kind == AttributeKind::Categorical)
      for (const auto& s : def.domain) {
        auto it = std::find(a.categories.begin(), a.categories.end(), s);
        remap.push_back(it == a.categories.end() ? a.categories.size()
                                                 : static_cast<std::size_t>(it - a.categories.begin()));
      }
    for (std::size_t r = 0; r < table.rows(); ++r) {
      double v = table.raw(r, cols[i]);
      if (is_missing(v)) fail(ErrorCode::OutOfDomain, "cannot encode a missing value of '" + a.name + "'");
      double* row = out.data() + r * dim_;
      if (a.kind == AttributeKind::Numeric) {
        row[a.offset] = encode_numeric(i, v);
      } else {
        std::size_t k = remap[static_cast<std::size_t>(v)];
        if (k >= a.categories.size())
          fail(ErrorCode::OutOfDomain, "value '" + def.domain[static_cast<std::size_t>(v)] +
                                           "' is not in the encoding of '" + a.name + "'");
        row[a.offset + k] = 1.0;
      }
    }
  }
  return out;
}

Schema Encoding::schema() const {
  Schema s;
  for (const auto& a : attrs_) {
    AttributeDef d;
    d.name = a.name;
    d.kind = a.kind;
    if (a.kind == AttributeKind::Categorical) d.domain = a.categories;
    s.push_back(std::move(d));
  }
  return s;
}

Table Encoding::decode(std::span<const double> data, std::size_t n) const {
  if (data.size() < n * dim_) fail(ErrorCode::Internal, "decode buffer too small");
  Table t(schema());
  t.reserve(n);
  std::vector<double> raw(attrs_.size());
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = data.data() + r * dim_;
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
      const auto& a = attrs_[i];
      if (a.kind == AttributeKind::Numeric) {
        raw[i] = decode_numeric(i, row[a.offset]);
      } else {
        std::size_t best = 0;
        for (std::size_t k = 1; k < a.width; ++k)
          if (row[a.offset + k] > row[a.offset + best]) best = k;
        raw[i] = static_cast<double>(best);
      }
    }
    t.append_raw(raw);
  }
  return t;
}

}  // namespace ow::mswg
