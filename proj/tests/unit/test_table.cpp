#include <cmath>
#include <random>

#include "doctest.h"
#include "openworld/csv.hpp"
#include "openworld/error.hpp"
#include "openworld/kv_config.hpp"
#include "openworld/table.hpp"

using namespace ow;

TEST_CASE("format_number round-trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    double x = u(rng) / (1 + i);
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("table stores categorical codes and missing values") {
  Table t({AttributeDef{"c", AttributeKind::Categorical, {}, {}}, AttributeDef{"x", AttributeKind::Numeric, {}, {}}});
  std::vector<Value> r1{std::string("b"), 1.5};
  std::vector<Value> r2{std::string("a"), kMissing};
  std::vector<Value> r3{std::string("b"), 2.0};
  t.append_row(r1);
  t.append_row(r2);
  t.append_row(r3);
  CHECK(t.rows() == 3);
  CHECK(t.schema()[0].domain == std::vector<std::string>{"b", "a"});
  CHECK(t.raw(2, 0) == 0.0);
  CHECK(std::get<std::string>(t.value(1, 0)) == "a");
  CHECK(is_missing(t.raw(1, 1)));

  std::vector<char> keep{1, 0, 1};
  Table f = t.filter_rows(keep);
  CHECK(f.rows() == 2);
  CHECK(f.raw(1, 1) == 2.0);

  std::vector<std::string> cols{"x"};
  Table s = t.select_columns(cols);
  CHECK(s.cols() == 1);
  CHECK(t == t);
  CHECK_FALSE(t == f);
}

TEST_CASE("value ordering puts numbers before strings") {
  CHECK(value_less(Value{1.0}, Value{2.0}));
  CHECK(value_less(Value{5.0}, Value{std::string("a")}));
  CHECK(value_less(Value{std::string("AOL")}, Value{std::string("Yahoo")}));
  CHECK_FALSE(value_less(Value{std::string("x")}, Value{std::string("x")}));
}

TEST_CASE("csv parsing handles quotes and comments") {
  auto doc = csv::parse("# note\na,b\n\"x, y\",\"he said \"\"hi\"\"\"\n1,2\n");
  REQUIRE(doc.header == std::vector<std::string>{"a", "b"});
  REQUIRE(doc.records.size() == 2);
  CHECK(doc.records[0].fields[0] == "x, y");
  CHECK(doc.records[0].fields[1] == "he said \"hi\"");
  CHECK(doc.records[1].line == 4);
  CHECK(csv::parse("").header.empty());
  CHECK_THROWS_AS(csv::parse("a,b\n\"open,1\n"), Error);
}

TEST_CASE("kv config parsing") {
  auto cfg = KvConfig::parse("# c\nmswg.lambda = 0.04\nlist = 1, 2,3\nflag = true\nmswg.lambda = 0.5\n");
  CHECK(cfg.get_double("mswg.lambda", 0) == 0.5);
  CHECK(cfg.get_ints("list", {}) == std::vector<int>{1, 2, 3});
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(KvConfig::parse("x = abc").get_double("x", 0), Error);
  CHECK_THROWS_AS(KvConfig::parse("no equals sign"), Error);
}
