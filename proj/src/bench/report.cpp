#include "openworld/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "openworld/csv.hpp"
#include "openworld/error.hpp"
#include "openworld/kv_config.hpp"
#include "openworld/table.hpp"

namespace ow::bench {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};

}  // namespace

std::string result_csv(const ResultTable& table) {
  std::ostringstream os;
  for (const auto& c : table.comments) os << "# " << c << '\n';
  csv::write_row(os, {table.key_name, "method", "mean", "p3", "q1", "median", "q3", "p97"});
  for (const auto& r : table.rows) {
    const Summary& s = r.summary;
    csv::write_row(os, {r.key, r.method, format_number(s.mean), format_number(s.p3), format_number(s.q1),
                        format_number(s.median), format_number(s.q3), format_number(s.p97)});
  }
  return os.str();
}

ResultTable parse_result_csv(std::string_view text) {
  ResultTable t;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos + 1, nl - pos - 1);
    if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    t.comments.emplace_back(line);
    pos = nl + 1;
  }
  csv::Document doc = csv::parse(text.substr(std::min(pos, text.size())));
  if (doc.header.size() != 8 || doc.header[1] != "method")
    fail(ErrorCode::ParseError, "result CSV must have 8 columns: <key>,method,mean,p3,q1,median,q3,p97");
  t.key_name = doc.header[0];
  for (const auto& rec : doc.records) {
    BoxRow r;
    r.key = rec.fields[0];
    r.method = rec.fields[1];
    double* dst[] = {&r.summary.mean, &r.summary.p3, &r.summary.q1, &r.summary.median, &r.summary.q3, &r.summary.p97};
    for (int i = 0; i < 6; ++i) *dst[i] = parse_double(rec.fields[2 + i], doc.header[2 + i]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::IoError, "error writing '" + path + "'");
}

void emit_csv(const ResultTable& table, const std::string& path) { write_text_file(path, result_csv(table)); }

std::string svg_boxplot(const ResultTable& table, const std::string& title) {
  std::vector<std::string> keys, methods;
  for (const auto& r : table.rows) {
    if (std::find(keys.begin(), keys.end(), r.key) == keys.end()) keys.push_back(r.key);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  const double left = 70, right = 20, top = 40, bottom = 60, plot_h = 320;
  const double group_w = std::max(1.0, static_cast<double>(methods.size())) * 36.0 + 24.0;
  const double width = left + right + std::max(1.0, static_cast<double>(keys.size())) * group_w;
  const double height = top + plot_h + bottom;
  double hi = 0.0;
  for (const auto& r : table.rows) hi = std::max({hi, r.summary.p97, r.summary.mean});
  if (!(hi > 0.0)) hi = 1.0;
  hi *= 1.05;
  auto y = [&](double v) { return top + plot_h - std::clamp(v / hi, 0.0, 1.0) * plot_h; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width, "%.0f") << "\" height=\""
     << fmt(height, "%.0f") << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"" << fmt(width, "%.0f") << "\" height=\"" << fmt(height, "%.0f")
     << "\" fill=\"white\"/>\n";
  if (!title.empty())
    os << "  <text x=\"" << fmt(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << xml_escape(title) << "</text>\n";
  os << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";
  os << "  <line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << fmt(width - right) << "\" y2=\""
     << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    double v = hi * t / 4.0;
    os << "  <text x=\"" << left - 6 << "\" y=\"" << fmt(y(v) + 4) << "\" text-anchor=\"end\">" << fmt(v, "%.1f")
       << "</text>\n";
  }
  os << "  <text x=\"16\" y=\"" << fmt(top + plot_h / 2) << "\" transform=\"rotate(-90 16 " << fmt(top + plot_h / 2)
     << ")\" text-anchor=\"middle\">percent difference</text>\n";
  for (std::size_t k = 0; k < keys.size(); ++k) {
    double gx = left + static_cast<double>(k) * group_w + 12.0;
    os << "  <text x=\"" << fmt(gx + (group_w - 24.0) / 2) << "\" y=\"" << fmt(top + plot_h + 18)
       << "\" text-anchor=\"middle\">" << xml_escape(keys[k]) << "</text>\n";
    for (std::size_t m = 0; m < methods.size(); ++m) {
      auto it = std::find_if(table.rows.begin(), table.rows.end(),
                             [&](const BoxRow& r) { return r.key == keys[k] && r.method == methods[m]; });
      if (it == table.rows.end() || std::isnan(it->summary.mean)) continue;
      const Summary& s = it->summary;
      const char* color = kPalette[m % (sizeof kPalette / sizeof *kPalette)];
      double x0 = gx + static_cast<double>(m) * 36.0 + 4.0, bw = 28.0, cx = x0 + bw / 2;
      os << "  <g>\n";
      os << "    <line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y(s.p97)) << "\" x2=\"" << fmt(cx) << "\" y2=\""
         << fmt(y(s.p3)) << "\" stroke=\"black\"/>\n";
      os << "    <rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y(s.q3)) << "\" width=\"" << fmt(bw) << "\" height=\""
         << fmt(std::max(0.5, y(s.q1) - y(s.q3))) << "\" fill=\"" << color << "\" stroke=\"black\"/>\n";
      os << "    <line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y(s.median)) << "\" x2=\"" << fmt(x0 + bw) << "\" y2=\""
         << fmt(y(s.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
      os << "    <circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(y(s.mean)) << "\" r=\"3\" fill=\"white\" stroke=\"black\"/>\n";
      os << "  </g>\n";
    }
  }
  for (std::size_t m = 0; m < methods.size(); ++m) {
    double lx = left + 10.0 + static_cast<double>(m) * 110.0;
    os << "  <rect x=\"" << fmt(lx) << "\" y=\"" << fmt(height - 22) << "\" width=\"12\" height=\"12\" fill=\""
       << kPalette[m % (sizeof kPalette / sizeof *kPalette)] << "\"/>\n";
    os << "  <text x=\"" << fmt(lx + 16) << "\" y=\"" << fmt(height - 12) << "\">" << xml_escape(methods[m])
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_svg_boxplot(const ResultTable& table, const std::string& path, const std::string& title) {
  write_text_file(path, svg_boxplot(table, title));
}

}  // namespace ow::bench
