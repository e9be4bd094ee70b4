#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "openworld/catalog.hpp"
#include "openworld/table.hpp"

namespace ow::mswg {

struct EncodedAttribute {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  double min = 0.0;
  double max = 1.0;
  bool integral = false;                // decode rounds to whole numbers
  std::vector<std::string> categories;  // one-hot order
  std::size_t offset = 0;
  std::size_t width = 1;
  bool operator==(const EncodedAttribute&) const = default;
};

/// Numeric attributes map affinely onto [0, 1]; categorical ones become one-hot blocks.
class Encoding {
 public:
  Encoding() = default;
  explicit Encoding(std::vector<EncodedAttribute> attributes);

  /// Ranges cover the sample and every marginal; categories are the sample's
  /// values followed by any extra marginal keys.
  static Encoding build(const Table& sample, const std::vector<Marginal>& marginals);

  std::size_t dim() const { return dim_; }
  const std::vector<EncodedAttribute>& attributes() const { return attrs_; }
  std::optional<std::size_t> find(std::string_view name) const;

  double encode_numeric(std::size_t attr, double value) const;
  double decode_numeric(std::size_t attr, double x) const;
  /// Index of `value` in the attribute's one-hot block; OutOfDomain if absent.
  std::size_t category_index(std::size_t attr, std::string_view value) const;

  /// Encodes every row of `table` (columns matched by name) into n x dim().
  std::vector<double> encode(const Table& table) const;
  /// Decodes n x dim() rows; categorical blocks are hardened by argmax.
  Table decode(std::span<const double> data, std::size_t n) const;
  Schema schema() const;

  bool operator==(const Encoding&) const = default;

 private:
  std::vector<EncodedAttribute> attrs_;
  std::size_t dim_ = 0;
};

}  // namespace ow::mswg
