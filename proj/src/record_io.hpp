#pragma once

// Line-oriented, space-separated record files shared by the catalog and
// generator formats.

#include <charconv>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "openworld/error.hpp"
#include "openworld/table.hpp"

namespace ow::detail {

inline std::string esc(std::string_view s) {
  if (s.empty()) return "~";
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    bool plain = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
                 c == '-' || c == '+' || c == '*' || c == '/' || c == ':';
    if (plain) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

inline std::string num(double v) { return format_number(v); }

class Writer {
 public:
  void line(std::initializer_list<std::string> tokens) {
    bool first = true;
    for (const auto& t : tokens) {
      if (!first) out_ << ' ';
      out_ << t;
      first = false;
    }
    out_ << '\n';
  }
  std::ostringstream& raw() { return out_; }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

class Reader {
 public:
  Reader(std::string_view text, std::string what) : what_(std::move(what)) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      lines_.emplace_back(text.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }

  bool done() const { return idx_ >= lines_.size(); }
  int lineno() const { return static_cast<int>(idx_); }

  std::vector<std::string> next() {
    if (done()) fail(ErrorCode::FormatVersionMismatch, what_ + " file is truncated");
    std::vector<std::string> toks;
    std::string_view l = lines_[idx_++];
    std::size_t p = 0;
    while (p <= l.size()) {
      std::size_t sp = l.find(' ', p);
      if (sp == std::string_view::npos) sp = l.size();
      toks.emplace_back(l.substr(p, sp - p));
      p = sp + 1;
    }
    return toks;
  }

  std::vector<std::string> expect(std::string_view tag, std::size_t min_tokens) {
    auto t = next();
    if (t.empty() || t[0] != tag || t.size() < min_tokens)
      fail(ErrorCode::ParseError, "expected '" + std::string(tag) + "' record", {lineno(), 0});
    return t;
  }

  [[noreturn]] void bad(const std::string& what) const { fail(ErrorCode::ParseError, what, {lineno(), 0}); }

 private:
  std::vector<std::string> lines_;
  std::size_t idx_ = 0;
  std::string what_;
};

inline std::string unesc(const Reader& rd, std::string_view s) {
  if (s == "~") return {};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 2 >= s.size()) rd.bad("bad escape");
    int v = 0;
    auto res = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
    if (res.ec != std::errc{} || res.ptr != s.data() + i + 3) rd.bad("bad escape");
    out.push_back(static_cast<char>(v));
    i += 2;
  }
  return out;
}

inline double to_num(const Reader& rd, const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) rd.bad("bad number '" + s + "'");
  return v;
}

inline std::size_t to_size(const Reader& rd, const std::string& s) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) rd.bad("bad count '" + s + "'");
  return v;
}

inline bool to_flag(const Reader& rd, const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  rd.bad("bad flag '" + s + "'");
}

}  // namespace ow::detail
