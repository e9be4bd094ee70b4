#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "openworld/error.hpp"

namespace ow::sql {

enum class TokenKind { Identifier, Number, String, Symbol, SemiOpen, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier/symbol spelling, unescaped string body, number spelling
  double number = 0.0;
  SourceLocation where;
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// Splits dialect text into tokens. `--` starts a comment running to end of
/// line. `SEMI-OPEN` (any case, no interior spaces) is a single token.
std::vector<Token> tokenize(std::string_view text);

bool iequals(std::string_view a, std::string_view b);

}  // namespace ow::sql
