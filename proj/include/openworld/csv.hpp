#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ow::csv {

struct Record {
  std::vector<std::string> fields;
  int line = 0;  // 1-based line where the record starts
};

struct Document {
  std::vector<std::string> header;
  std::vector<Record> records;
};

/// RFC 4180 style: comma separated, double-quoted fields may contain commas,
/// quotes ("") and newlines. A header row is required unless the text is empty.
/// Lines starting with '#' before the header are skipped.
Document parse(std::string_view text);
Document read_file(const std::string& path);

std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace ow::csv
