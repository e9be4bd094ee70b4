#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "openworld/catalog.hpp"
#include "openworld/executor.hpp"
#include "openworld/parser.hpp"

namespace support {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Runs the DDL statements of `text` against a catalog; SELECTs are rejected.
inline void ddl(ow::Catalog& cat, std::string_view text) {
  for (const auto& st : ow::sql::parse(text)) {
    std::visit(overloaded{
                   [&](const ow::sql::CreateTable& s) { cat.create_table(s); },
                   [&](const ow::sql::CreatePopulation& s) { cat.create_population(s); },
                   [&](const ow::sql::CreateSample& s) { cat.create_sample(s); },
                   [&](const ow::sql::CreateMetadata& s) { cat.create_metadata(s); },
                   [&](const ow::sql::Ingest& s) { cat.ingest_csv(s.relation, s.path); },
                   [&](const ow::sql::SelectQuery&) { throw std::logic_error("ddl() given a SELECT"); },
               },
               st.body);
  }
}

inline ow::sql::SelectQuery select(std::string_view text) {
  auto stmts = ow::sql::parse(text);
  return std::get<ow::sql::SelectQuery>(stmts.at(0).body);
}

inline std::vector<std::vector<std::string>> rows_of(std::initializer_list<std::vector<std::string>> r) { return r; }

/// The migrants walkthrough catalog with small inline data.
inline ow::Catalog migrants_catalog() {
  ow::Catalog cat;
  ddl(cat, R"(
    CREATE TEMPORARY TABLE Eurostat (country TEXT, email TEXT, reported_count INT);
    CREATE GLOBAL POPULATION EuropeMigrants (country TEXT, email TEXT);
  )");
  cat.ingest_rows("Eurostat", {"country", "email", "reported_count"},
                  {{"UK", "Yahoo", "200"}, {"UK", "AOL", "100"}, {"UK", "Gmail", "100"},
                   {"FR", "Yahoo", "90"}, {"FR", "AOL", "30"}, {"FR", "Gmail", "60"}});
  ddl(cat, R"(
    CREATE METADATA EuropeMigrants_M1 AS (SELECT country, reported_count FROM Eurostat);
    CREATE METADATA EuropeMigrants_M2 AS (SELECT email, reported_count FROM Eurostat);
    CREATE SAMPLE YahooMigrants AS (SELECT * FROM EuropeMigrants WHERE email = Yahoo);
  )");
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 30; ++i) rows.push_back({"UK", "Yahoo"});
  for (int i = 0; i < 20; ++i) rows.push_back({"FR", "Yahoo"});
  cat.ingest_rows("YahooMigrants", {"country", "email"}, rows);
  return cat;
}

/// Answer rows keyed by their group columns, to compare answers by key.
inline std::map<std::vector<std::string>, std::vector<double>> by_key(const ow::QueryAnswer& a) {
  std::map<std::vector<std::string>, std::vector<double>> out;
  for (const auto& row : a.rows) {
    std::vector<std::string> key;
    std::vector<double> vals;
    for (std::size_t c = 0; c < row.size(); ++c) {
      bool is_key = std::find(a.key_columns.begin(), a.key_columns.end(), c) != a.key_columns.end();
      if (is_key) key.push_back(ow::format_value(row[c]));
      else if (const double* d = std::get_if<double>(&row[c])) vals.push_back(*d);
    }
    out[key] = vals;
  }
  return out;
}

}  // namespace support
