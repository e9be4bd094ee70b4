#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "openworld/bench/metrics.hpp"

namespace ow::bench {

struct BoxRow {
  std::string key;  // coverage or query id, already formatted
  std::string method;
  Summary summary;
  bool operator==(const BoxRow& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    return key == o.key && method == o.method && same(summary.mean, o.summary.mean) && same(summary.p3, o.summary.p3) &&
           same(summary.q1, o.summary.q1) && same(summary.median, o.summary.median) &&
           same(summary.q3, o.summary.q3) && same(summary.p97, o.summary.p97);
  }
};

struct ResultTable {
  std::string key_name = "coverage";
  std::vector<std::string> comments;  // written as leading '#' lines
  std::vector<BoxRow> rows;
  bool operator==(const ResultTable& o) const { return key_name == o.key_name && rows == o.rows; }
};

/// Header `<key>,method,mean,p3,q1,median,q3,p97`, preceded by comment lines.
std::string result_csv(const ResultTable& table);
ResultTable parse_result_csv(std::string_view text);
void emit_csv(const ResultTable& table, const std::string& path);

/// Static SVG: one box per (key, method) with 3rd/97th percentile whiskers and the mean marked.
std::string svg_boxplot(const ResultTable& table, const std::string& title);
void emit_svg_boxplot(const ResultTable& table, const std::string& path, const std::string& title = "");

void write_text_file(const std::string& path, std::string_view text);

}  // namespace ow::bench
