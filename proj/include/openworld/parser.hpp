#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "openworld/ast.hpp"
#include "openworld/error.hpp"

namespace ow::sql {

/// Syntax error carrying the token set the parser would have accepted.
class SyntaxError : public Error {
 public:
  SyntaxError(SourceLocation where, std::vector<std::string> expected, const std::string& found);
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::vector<std::string> expected_;
};

/// Parses a script of `;`-terminated statements. Keywords are case-insensitive.
std::vector<Statement> parse(std::string_view text);

/// Parses a bare conjunctive predicate (`a = 1 AND b IN ('x', 'y')`).
Predicate parse_predicate(std::string_view text);

/// Canonical text; parse(render(x)) is structurally equal to x.
std::string render(const StatementBody& stmt);
std::string render(const std::vector<Statement>& stmts);
std::string render(const std::vector<StatementBody>& stmts);
std::string render_predicate(const Predicate& pred);
std::string render_literal(const Literal& lit);

/// True when `word` is reserved and cannot be used as a bare identifier.
bool is_reserved(std::string_view word);

}  // namespace ow::sql
