#include <filesystem>
#include <random>

#include "doctest.h"
#include "openworld/catalog.hpp"
#include "openworld/error.hpp"
#include "support.hpp"

using namespace ow;

namespace {

/// A random but valid catalog: a GP, a derived population, up to three
/// samples with random rows and weights, and marginals over random attributes.
Catalog random_catalog(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  Catalog cat;
  cat.set_seed(rng());
  support::ddl(cat, "CREATE GLOBAL POPULATION G (cat TEXT, num REAL, odd TEXT);");
  support::ddl(cat, "CREATE POPULATION Sub AS (SELECT * FROM G WHERE num > -10 AND cat IN ('a', 'b c'));");
  const std::vector<std::string> cats = {"a", "b c", "%x", "~", "d\"q", "-"};
  int samples = 1 + pick(3);
  for (int s = 0; s < samples; ++s) {
    std::string name = "S" + std::to_string(s);
    std::string mech = pick(2) ? " USING MECHANISM UNIFORM PERCENT " + std::to_string(1 + pick(100)) : "";
    support::ddl(cat, "CREATE SAMPLE " + name + " AS (SELECT * FROM G" + mech + ");");
    std::vector<std::vector<std::string>> rows;
    int n = pick(20);
    for (int r = 0; r < n; ++r) {
      std::string c = cats[pick(2) ? 0 : 1];
      std::string num = format_number(u(rng));
      rows.push_back({c, num, cats[pick(static_cast<int>(cats.size()))]});
    }
    cat.ingest_rows(name, {"cat", "num", "odd"}, rows);
    std::vector<double> w(cat.find_sample(name)->rows());
    for (auto& x : w) x = std::abs(u(rng));
    cat.set_weights(name, w);
  }
  cat.create_metadata("G", {"cat"}, {{{std::string("a")}, 1.0 + pick(9)}, {{std::string("AOL")}, 0.5}}, "G_cat");
  cat.create_metadata("G", {"cat", "num"}, {{{std::string("a"), 3.0}, 2.0}, {{std::string("b c"), 7.0}, 1.25}}, "G_cn",
                      {std::nullopt, Binning{-50.0, 50.0, 1 + pick(64)}});
  if (pick(2)) cat.create_metadata("Sub", {"num"}, {{{1.0}, 4.0}}, "Sub_num");
  support::ddl(cat, "CREATE TEMPORARY TABLE Aux (k TEXT, v INT);");
  cat.ingest_rows("Aux", {"k", "v"}, {{"x", "1"}, {"y z", "2"}});
  cat.validate();
  return cat;
}

}  // namespace

TEST_CASE("catalog round-trip of the walkthrough state") {
  Catalog cat = support::migrants_catalog();
  std::string text = serialize_catalog(cat.state());
  CHECK(text.rfind("openworld-catalog 1\n", 0) == 0);
  CatalogState back = deserialize_catalog(text);
  CHECK(back == cat.state());
  CHECK(serialize_catalog(back) == text);
}

TEST_CASE("save and load through a file") {
  Catalog cat = support::migrants_catalog();
  support::ddl(cat, "CREATE METADATA EuropeMigrants_J AS (SELECT country, email, reported_count FROM Eurostat);");
  auto path = (std::filesystem::temp_directory_path() / "owtest_catalog.owc").string();
  cat.save(path);
  Catalog back = Catalog::load(path);
  CHECK(back.state().marginals.size() == 3);
  CHECK(back.state().samples.size() == 1);
  CHECK(back.state() == cat.state());
  CHECK_THROWS_AS(Catalog::load("/nonexistent/x.owc"), Error);
}

TEST_CASE("save/load is an involution on random catalogs") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Catalog cat = random_catalog(seed);
    CatalogState back = deserialize_catalog(serialize_catalog(cat.state()));
    REQUIRE_MESSAGE(back == cat.state(), "seed " << seed);
    Catalog(back).validate();
  }
}

TEST_CASE("damaged catalog files are rejected") {
  std::string text = serialize_catalog(random_catalog(5).state());
  auto expect_format_error = [](std::string_view t) {
    try {
      deserialize_catalog(t);
      return false;
    } catch (const Error& e) {
      return e.code() == ErrorCode::FormatVersionMismatch || e.code() == ErrorCode::ParseError;
    }
  };
  CHECK(expect_format_error(""));
  CHECK(expect_format_error("openworld-catalog 2\n"));
  CHECK(expect_format_error("something else\n"));
  for (std::size_t cut : {text.size() / 4, text.size() / 2, text.size() - 5}) {
    CHECK(expect_format_error(text.substr(0, text.rfind('\n', cut))));
  }
}
