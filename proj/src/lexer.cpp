#include "openworld/lexer.hpp"

#include <cctype>
#include <charconv>

namespace ow::sql {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token tok;
      tok.where = {line_, col_};
      tok.offset = pos_;
      if (pos_ >= text_.size()) {
        tok.kind = TokenKind::End;
        out.push_back(tok);
        return out;
      }
      char c = text_[pos_];
      if (ident_start(c)) {
        lex_identifier(tok);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        lex_number(tok);
      } else if (c == '\'' || c == '`') {
        lex_string(tok);
      } else {
        lex_symbol(tok);
      }
      tok.length = pos_ - tok.offset;
      out.push_back(std::move(tok));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  void lex_identifier(Token& tok) {
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
    std::string_view word = text_.substr(start, pos_ - start);
    if (iequals(word, "SEMI") && pos_ + 5 <= text_.size() && text_[pos_] == '-' &&
        iequals(text_.substr(pos_ + 1, 4), "OPEN") && (pos_ + 5 == text_.size() || !ident_char(text_[pos_ + 5]))) {
      for (int i = 0; i < 5; ++i) advance();
      tok.kind = TokenKind::SemiOpen;
      tok.text = "SEMI-OPEN";
      return;
    }
    tok.kind = TokenKind::Identifier;
    tok.text = std::string(word);
  }

  void lex_number(Token& tok) {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = col_;
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    tok.kind = TokenKind::Number;
    tok.text = std::string(text_.substr(start, pos_ - start));
    auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
    if (res.ec != std::errc{}) fail(ErrorCode::SyntaxError, "malformed number '" + tok.text + "'", tok.where);
    if (pos_ < text_.size() && ident_start(text_[pos_]))
      fail(ErrorCode::SyntaxError, "malformed number '" + tok.text + "'", tok.where);
  }

  void lex_string(Token& tok) {
    advance();  // opening quote
    std::string body;
    for (;;) {
      if (pos_ >= text_.size()) fail(ErrorCode::SyntaxError, "unterminated string literal", tok.where);
      char c = text_[pos_];
      if (c == '\'') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
          body.push_back('\'');
          advance();
          advance();
          continue;
        }
        advance();
        break;
      }
      body.push_back(c);
      advance();
    }
    tok.kind = TokenKind::String;
    tok.text = std::move(body);
  }

  void lex_symbol(Token& tok) {
    char c = text_[pos_];
    tok.kind = TokenKind::Symbol;
    if ((c == '<' || c == '>') && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
      tok.text = std::string{c, '='};
      advance();
      advance();
      return;
    }
    static constexpr std::string_view kSingles = "(),;*=<>[]-";
    if (kSingles.find(c) == std::string_view::npos)
      fail(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'", tok.where);
    tok.text = std::string(1, c);
    advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace ow::sql
