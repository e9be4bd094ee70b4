#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "openworld/catalog.hpp"
#include "openworld/error.hpp"
#include "support.hpp"

using namespace ow;
using support::ddl;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("owtest_" + name);
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("global population registration") {
  Catalog cat;
  ddl(cat, "CREATE GLOBAL POPULATION EuropeMigrants;");
  CHECK(cat.has_global());
  CHECK(cat.global_population().name == "EuropeMigrants");
  CHECK(code_of([&] { ddl(cat, "CREATE GLOBAL POPULATION X;"); }) == ErrorCode::DuplicateName);
  CHECK(code_of([&] { ddl(cat, "CREATE TABLE EuropeMigrants;"); }) == ErrorCode::DuplicateName);
  cat.validate();
}

TEST_CASE("derived population needs the global population") {
  Catalog cat;
  CHECK(code_of([&] { ddl(cat, "CREATE POPULATION UK AS (SELECT * FROM G WHERE country = 'UK');"); }) ==
        ErrorCode::NoGlobalPopulation);
  ddl(cat, "CREATE GLOBAL POPULATION G (country TEXT, age INT);");
  ddl(cat, "CREATE POPULATION UK AS (SELECT * FROM G WHERE country = 'UK');");
  const PopulationDef* p = cat.find_population("UK");
  REQUIRE(p);
  CHECK(p->source == "G");
  CHECK(p->predicate.atoms.size() == 1);
  CHECK(code_of([&] { ddl(cat, "CREATE POPULATION Bad AS (SELECT * FROM G WHERE height > 2);"); }) ==
        ErrorCode::UnknownAttribute);
  CHECK(code_of([&] { ddl(cat, "CREATE POPULATION Bad2 AS (SELECT * FROM G WHERE age = 'old');"); }) ==
        ErrorCode::TypeMismatch);
  cat.validate();
}

TEST_CASE("samples and mechanisms") {
  Catalog cat;
  ddl(cat, "CREATE GLOBAL POPULATION Migrants;");
  ddl(cat, "CREATE SAMPLE YahooMigrants AS (SELECT * FROM Migrants WHERE email = Yahoo);");
  REQUIRE(cat.find_sample("YahooMigrants"));
  CHECK_FALSE(cat.find_sample("YahooMigrants")->mechanism.has_value());

  ddl(cat, "CREATE SAMPLE S10 AS (SELECT * FROM Migrants USING MECHANISM UNIFORM PERCENT 10);");
  const auto* s = cat.find_sample("S10");
  REQUIRE(s->mechanism);
  CHECK(s->mechanism->inclusion_probability() == doctest::Approx(0.10));

  CHECK(code_of([&] { ddl(cat, "CREATE SAMPLE Z AS (SELECT * FROM Migrants USING MECHANISM UNIFORM PERCENT 0);"); }) ==
        ErrorCode::InvalidPercent);
  CHECK(code_of([&] { ddl(cat, "CREATE SAMPLE Z AS (SELECT * FROM Migrants USING MECHANISM UNIFORM PERCENT 120);"); }) ==
        ErrorCode::InvalidPercent);
  CHECK(code_of([&] { ddl(cat, "CREATE SAMPLE Z AS (SELECT * FROM Nowhere);"); }) == ErrorCode::UnknownPopulation);
  cat.validate();
}

TEST_CASE("ingestion keeps weights aligned with rows") {
  Catalog cat = support::migrants_catalog();
  const auto* s = cat.find_sample("YahooMigrants");
  CHECK(s->rows() == 50);
  CHECK(s->weights.size() == 50);
  for (double w : s->weights) CHECK(w == 1.0);
  // The sample's domain grows the GP's active domain.
  const auto* gp_email = find_attribute_def(cat.global_population().schema, "email");
  REQUIRE(gp_email);
  CHECK(gp_email->kind == AttributeKind::Categorical);
  cat.validate();

  CHECK(code_of([&] { cat.set_weights("YahooMigrants", std::vector<double>(49, 1.0)); }) == ErrorCode::TypeMismatch);
  CHECK(code_of([&] { cat.set_weights("YahooMigrants", std::vector<double>(50, -1.0)); }) == ErrorCode::NegativeCount);
  cat.set_weights("YahooMigrants", std::vector<double>(50, 2.0));
  CHECK(cat.find_sample("YahooMigrants")->weights[0] == 2.0);
}

TEST_CASE("csv ingestion counts and errors") {
  Catalog cat;
  ddl(cat, "CREATE GLOBAL POPULATION F (C TEXT, E INT);");
  ddl(cat, "CREATE SAMPLE FS AS (SELECT * FROM F);");
  std::string body = "C,E\n";
  for (int i = 0; i < 21320; ++i) body += (i % 2 ? "AA," : "WN,") + std::to_string(100 + i % 300) + "\n";
  CHECK(cat.ingest_csv("FS", temp_file("big.csv", body)) == 21320);
  CHECK(cat.find_sample("FS")->rows() == 21320);

  ddl(cat, "CREATE SAMPLE FS2 AS (SELECT * FROM F);");
  CHECK(cat.ingest_csv("FS2", temp_file("empty.csv", "")) == 0);

  try {
    cat.ingest_csv("FS2", temp_file("bad.csv", "C,E\nAA,12\nAA,twelve\n"));
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.where().line == 3);
  }
  CHECK(cat.find_sample("FS2")->rows() == 0);
  CHECK(code_of([&] { cat.ingest_csv("Nope", temp_file("x.csv", "C,E\n")); }) == ErrorCode::UnknownRelation);
  CHECK(code_of([&] { cat.ingest_csv("FS2", "/nonexistent/file.csv"); }) == ErrorCode::IoError);
}

TEST_CASE("metadata from auxiliary tables") {
  Catalog cat = support::migrants_catalog();
  auto ms = cat.marginals_of("EuropeMigrants");
  REQUIRE(ms.size() == 2);
  const Marginal* m1 = ms[0];
  CHECK(m1->attributes == std::vector<std::string>{"country"});
  CHECK(m1->total() == doctest::Approx(580));
  double uk = 0;
  for (const auto& c : m1->cells)
    if (std::get<std::string>(c.key[0]) == "UK") uk = c.count;
  CHECK(uk == 400);

  ddl(cat, "CREATE METADATA EuropeMigrants_J AS (SELECT country, email, reported_count FROM Eurostat);");
  CHECK(cat.marginals_of("EuropeMigrants").back()->dimension() == 2);
  CHECK(cat.marginals_of("EuropeMigrants").back()->cells.size() == 6);

  ddl(cat, "CREATE TABLE T3 (a INT, b INT, c INT, n INT);");
  CHECK(code_of([&] { ddl(cat, "CREATE METADATA EuropeMigrants_T AS (SELECT a, b, c, n FROM T3);"); }) ==
        ErrorCode::TooManyAttributes);
  CHECK(code_of([&] { ddl(cat, "CREATE METADATA Nobody_M AS (SELECT country, reported_count FROM Eurostat);"); }) ==
        ErrorCode::UnknownPopulation);
  CHECK(code_of([&] { ddl(cat, "CREATE METADATA EuropeMigrants_X AS (SELECT country, reported_count FROM Missing);"); }) ==
        ErrorCode::UnknownRelation);
  cat.validate();
}

TEST_CASE("direct marginal registration") {
  Catalog cat;
  ddl(cat, "CREATE GLOBAL POPULATION P (A TEXT, B INT);");
  CHECK(code_of([&] { cat.create_metadata("P", {"A"}, {{{std::string("x")}, -1.0}}, "P_neg"); }) ==
        ErrorCode::NegativeCount);
  CHECK(code_of([&] { cat.create_metadata("P", {"B"}, {{{std::string("x")}, 1.0}}, "P_type"); }) ==
        ErrorCode::TypeMismatch);
  CHECK(code_of([&] { cat.create_metadata("P", {"A", "B", "A"}, {}, "P_3"); }) == ErrorCode::TooManyAttributes);
  cat.create_metadata("P", {"A"}, {{{std::string("x")}, 3.0}, {{std::string("y")}, 1.0}}, "P_A");
  cat.create_metadata("P", {"A", "B"}, {{{std::string("x"), 1.0}, 3.0}, {{std::string("y"), 2.0}, 1.0}}, "P_AB");
  CHECK(cat.marginals_of("P").size() == 2);
  CHECK(code_of([&] { cat.create_metadata("P", {"A"}, {{{std::string("z")}, 1.0}}, "P_A2"); }) ==
        ErrorCode::DuplicateName);
  cat.validate();
}

TEST_CASE("cell keys") {
  Table t({AttributeDef{"country", AttributeKind::Categorical, {}, {}}, AttributeDef{"C", AttributeKind::Categorical, {}, {}},
           AttributeDef{"E", AttributeKind::Numeric, {}, {}}});
  std::vector<Value> row{std::string("UK"), std::string("AA"), 250.0};
  t.append_row(row);

  Marginal mc{"m", "P", {"country"}, {AttributeKind::Categorical}, {std::nullopt}, {}};
  CHECK(cell_of(t, 0, mc) == std::vector<Value>{std::string("UK")});

  Marginal mce{"m2", "P", {"C", "E"}, {AttributeKind::Categorical, AttributeKind::Numeric}, {std::nullopt, std::nullopt}, {}};
  CHECK(cell_of(t, 0, mce) == std::vector<Value>{std::string("AA"), 250.0});

  Marginal binned{"m3", "P", {"E"}, {AttributeKind::Numeric}, {Binning{0.0, 100.0, 10}}, {}};
  CHECK(cell_of(t, 0, binned) == std::vector<Value>{9.0});
  CHECK_THROWS_AS(cell_of(t, 0, binned, true), Error);
}

TEST_CASE("binning maps values to equi-width bins") {
  Binning b{0.0, 10.0, 5};
  CHECK(b.bin_of(0.0) == 0);
  CHECK(b.bin_of(1.99) == 0);
  CHECK(b.bin_of(2.0) == 1);
  CHECK(b.bin_of(10.0) == 4);
  bool clamped = false;
  CHECK(b.bin_of(-3.0, &clamped) == 0);
  CHECK(clamped);
  CHECK(b.midpoint(2) == doctest::Approx(5.0));
}

TEST_CASE("marginals from tables use integer cells or bins") {
  Table t({AttributeDef{"x", AttributeKind::Numeric, {}, {}}});
  for (double v : {1.0, 2.0, 2.0, 5.0}) {
    std::vector<Value> r{v};
    t.append_row(r);
  }
  Marginal m = marginal_from_table(t, "m", "P", {"x"});
  CHECK_FALSE(m.binning[0].has_value());
  CHECK(m.cells.size() == 3);
  CHECK(m.total() == 4.0);

  Table u({AttributeDef{"x", AttributeKind::Numeric, {}, {}}});
  for (int i = 0; i < 100; ++i) {
    std::vector<Value> r{i + 0.5};
    u.append_row(r);
  }
  Marginal mb = marginal_from_table(u, "mb", "P", {"x"}, {}, 10);
  REQUIRE(mb.binning[0].has_value());
  CHECK(mb.binning[0]->bins == 10);
  CHECK(mb.cells.size() == 10);
  for (const auto& c : mb.cells) CHECK(c.count == 10.0);
}
