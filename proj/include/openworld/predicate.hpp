#pragma once

#include <vector>

#include "openworld/ast.hpp"
#include "openworld/table.hpp"

namespace ow {

/// A predicate bound to a table's schema. Missing cells never satisfy an atom.
class BoundPredicate {
 public:
  BoundPredicate(const sql::Predicate& pred, const Table& table);

  bool matches(std::size_t row) const;
  std::vector<char> mask() const;

 private:
  struct Term {
    std::size_t column = 0;
    bool categorical = false;
    sql::CompareOp op = sql::CompareOp::Eq;
    bool is_in = false;
    double number = 0.0;
    std::vector<double> set;             // codes or numbers for IN / categorical '='
    std::vector<char> code_satisfies;    // categorical ordered comparisons, by code
  };
  const Table* table_;
  std::vector<Term> terms_;
};

std::vector<char> evaluate_predicate(const sql::Predicate& pred, const Table& table);

}  // namespace ow
