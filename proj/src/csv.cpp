#include "openworld/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "openworld/error.hpp"

namespace ow::csv {

namespace {

// Reads one record starting at pos; returns false at end of input.
bool next_record(std::string_view text, std::size_t& pos, int& line, Record& rec) {
  if (pos >= text.size()) return false;
  rec.fields.clear();
  rec.line = line;
  std::string field;
  bool in_quotes = false;
  bool quoted_field = false;
  while (pos < text.size()) {
    char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        in_quotes = false;
        ++pos;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"') {
      if (!field.empty())
        fail(ErrorCode::ParseError, "quote inside unquoted field", {line, 0});
      in_quotes = true;
      quoted_field = true;
      ++pos;
      continue;
    }
    if (c == ',') {
      rec.fields.push_back(std::move(field));
      field.clear();
      quoted_field = false;
      ++pos;
      continue;
    }
    if (c == '\r') {
      ++pos;
      continue;
    }
    if (c == '\n') {
      ++pos;
      ++line;
      rec.fields.push_back(std::move(field));
      return true;
    }
    if (quoted_field) fail(ErrorCode::ParseError, "text after closing quote", {line, 0});
    field.push_back(c);
    ++pos;
  }
  if (in_quotes) fail(ErrorCode::ParseError, "unterminated quoted field", {rec.line, 0});
  rec.fields.push_back(std::move(field));
  return true;
}

bool blank(const Record& r) { return r.fields.size() == 1 && r.fields[0].empty(); }

}  // namespace

Document parse(std::string_view text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
    text.remove_prefix(3);
  Document doc;
  std::size_t pos = 0;
  int line = 1;
  Record rec;
  bool have_header = false;
  while (next_record(text, pos, line, rec)) {
    if (!have_header) {
      if (blank(rec) || (!rec.fields.empty() && !rec.fields[0].empty() && rec.fields[0][0] == '#')) continue;
      doc.header = rec.fields;
      have_header = true;
      continue;
    }
    if (blank(rec)) continue;
    if (rec.fields.size() != doc.header.size())
      fail(ErrorCode::ParseError,
           "expected " + std::to_string(doc.header.size()) + " fields, found " + std::to_string(rec.fields.size()),
           {rec.line, 0});
    doc.records.push_back(rec);
  }
  return doc;
}

Document read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote(fields[i]);
  }
  out << '\n';
}

}  // namespace ow::csv
