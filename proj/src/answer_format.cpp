#include <cstdio>
#include <sstream>

#include "openworld/csv.hpp"
#include "openworld/executor.hpp"

namespace ow {

namespace {

std::string display(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (is_missing(*d)) return "NULL";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", *d);
    return buf;
  }
  return std::get<std::string>(v);
}

}  // namespace

std::string format_table(const QueryAnswer& answer) {
  const std::size_t nc = answer.columns.size();
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(nc, 0);
  for (std::size_t c = 0; c < nc; ++c) width[c] = answer.columns[c].size();
  for (const auto& row : answer.rows) {
    std::vector<std::string> r;
    for (std::size_t c = 0; c < nc; ++c) {
      r.push_back(display(row[c]));
      width[c] = std::max(width[c], r.back().size());
    }
    cells.push_back(std::move(r));
  }
  std::ostringstream os;
  auto rule = [&]() {
    for (std::size_t c = 0; c < nc; ++c) os << (c ? "-+-" : "") << std::string(width[c], '-');
    os << '\n';
  };
  auto emit = [&](const std::string& line) {
    os << line.substr(0, line.find_last_not_of(' ') + 1) << '\n';
  };
  std::string line;
  for (std::size_t c = 0; c < nc; ++c)
    line += (c ? " | " : "") + answer.columns[c] + std::string(width[c] - answer.columns[c].size(), ' ');
  emit(line);
  rule();
  for (std::size_t r = 0; r < cells.size(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < nc; ++c) {
      const std::string& s = cells[r][c];
      std::string pad(width[c] - s.size(), ' ');
      bool numeric = std::holds_alternative<double>(answer.rows[r][c]);
      line += (c ? " | " : "") + (numeric ? pad + s : s + pad);
    }
    emit(line);
  }
  os << '(' << answer.rows.size() << (answer.rows.size() == 1 ? " row" : " rows") << ", " << to_string(answer.provenance);
  if (!answer.sample.empty()) os << ", sample " << answer.sample;
  if (answer.materialized) os << ", materialized generated sample";
  if (answer.ipf) {
    os << ", ipf " << answer.ipf->rounds << (answer.ipf->rounds == 1 ? " round" : " rounds")
       << (answer.ipf->converged ? "" : " (not converged)");
    if (!answer.ipf->structural_zeros.empty()) os << ", " << answer.ipf->structural_zeros.size() << " structural zeros dropped";
  }
  if (answer.generation)
    os << ", " << answer.generation->samples << " generated samples of " << answer.generation->rows_per_sample
       << " rows" << (answer.generation->cached ? ", cached generator" : "");
  os << ")\n";
  return os.str();
}

std::string format_csv(const QueryAnswer& answer) {
  std::ostringstream os;
  csv::write_row(os, answer.columns);
  for (const auto& row : answer.rows) {
    std::vector<std::string> fields;
    for (const auto& v : row) fields.push_back(format_value(v));
    csv::write_row(os, fields);
  }
  return os.str();
}

}  // namespace ow
