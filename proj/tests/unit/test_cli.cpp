#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "openworld/error.hpp"
#include "openworld/session.hpp"

using namespace ow;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("owtest_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Runs the owq binary with `args`, feeding `input` on stdin.
Run owq(const std::string& args, const fs::path& dir, const std::string& input = "") {
  write(dir / "stdin.txt", input);
  std::string cmd = std::string("'") + OW_OWQ + "' " + args + " < '" + (dir / "stdin.txt").string() + "' > '" +
                    (dir / "stdout.txt").string() + "' 2> '" + (dir / "stderr.txt").string() + "'";
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

const char* kQuickTraining = "mswg.epochs = 2\nmswg.steps_per_epoch = 5\nmswg.hidden_layers = 16,16\nmswg.batch_size = 64\n";

}  // namespace

TEST_CASE("the migrants script runs end to end") {
  auto dir = scratch("script");
  write(dir / "quick.cfg", kQuickTraining);
  Run r = owq("--quiet --script '" + std::string(OW_DATA_DIR) + "/migrants/script.sql' --config '" +
                  (dir / "quick.cfg").string() + "'",
              dir);
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(count(r.out, "semi_open_ipf_direct") == 1);
  CHECK(count(r.out, ", open") == 1);
  CHECK(r.out.find("country") != std::string::npos);
}

TEST_CASE("csv output") {
  auto dir = scratch("csv");
  write(dir / "s.sql", R"(
    CREATE GLOBAL POPULATION G (k TEXT, v INT);
    CREATE SAMPLE S AS (SELECT * FROM G USING MECHANISM UNIFORM PERCENT 50);
    INGEST S FROM 'rows.csv';
    SELECT SEMI-OPEN k, COUNT(*) FROM G GROUP BY k;
  )");
  write(dir / "rows.csv", "k,v\na,1\na,2\nb,3\n");
  Run r = owq("-q --output csv --script '" + (dir / "s.sql").string() + "'", dir);
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(r.out == "k,COUNT(*)\na,4\nb,2\n");
}

TEST_CASE("an empty script succeeds silently") {
  auto dir = scratch("empty");
  write(dir / "e.sql", "");
  Run r = owq("--script '" + (dir / "e.sql").string() + "'", dir);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  write(dir / "c.sql", "-- nothing here\n");
  CHECK(owq("--script '" + (dir / "c.sql").string() + "'", dir).out.empty());
}

TEST_CASE("structural zeros fail the script under the strict policy") {
  auto dir = scratch("strict");
  write(dir / "strict.cfg", "ipf.zero_policy = error\n");
  Run r = owq("-q --script '" + std::string(OW_DATA_DIR) + "/migrants/script.sql' --config '" +
                  (dir / "strict.cfg").string() + "'",
              dir);
  CHECK(r.code == kExitUserError);
  CHECK(r.err.find("StructuralZero") != std::string::npos);
}

TEST_CASE("usage errors") {
  auto dir = scratch("usage");
  CHECK(owq("--output xml", dir).code != 0);
  CHECK(owq("--script /nonexistent/x.sql", dir).code != 0);
  write(dir / "bad.cfg", "this is not a setting\n");
  CHECK(owq("--config '" + (dir / "bad.cfg").string() + "'", dir).code == kExitUserError);
  write(dir / "syntax.sql", "CREATE GLOBAL POPULATION G (k TEXT);\nSELECT k FROM G GROUP BY k;\n");
  Run r = owq("--script '" + (dir / "syntax.sql").string() + "'", dir);
  CHECK(r.code == kExitUserError);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("the REPL reports errors and keeps going") {
  std::istringstream in(
      "CREATE GLOBAL POPULATION G (k TEXT);\n"
      "CREATE SAMPLE S AS (SELECT * FROM G USING MECHANISM UNIFORM PERCENT 25);\n"
      "SELEC nonsense;\n"
      "\\nosuchcommand\n"
      "SELECT COUNT(*) FROM Missing;\n"
      "SELECT SEMI-OPEN COUNT(*)\n  FROM G;\n"
      "\\quit\n"
      "SELECT COUNT(*) FROM G;\n");
  std::ostringstream out, err;
  CliConfig cfg;
  cfg.quiet = true;
  int code = repl_loop(cfg, in, out, err);
  CHECK(code == 0);
  CHECK(count(err.str(), "SyntaxError") == 1);
  CHECK(count(err.str(), "ConfigError") == 1);
  CHECK(count(err.str(), "UnknownPopulation") == 1);
  // The empty sample answers 0; nothing after \quit runs.
  CHECK(count(out.str(), "semi_open_mechanism") == 1);
  CHECK(count(out.str(), "closed") == 0);
}

TEST_CASE("catalogs persist across invocations") {
  auto dir = scratch("persist");
  std::string cat = (dir / "c.owc").string();
  write(dir / "rows.csv", "k\na\nb\nb\n");
  write(dir / "one.sql", "CREATE GLOBAL POPULATION G (k TEXT);\nCREATE SAMPLE S AS (SELECT * FROM G);\nINGEST S FROM 'rows.csv';\n");
  write(dir / "two.sql", "SELECT k, COUNT(*) FROM G GROUP BY k;\n");
  CHECK(owq("-q --catalog '" + cat + "' --script '" + (dir / "one.sql").string() + "'", dir).code == 0);
  CHECK(fs::exists(cat));
  Run r = owq("-q --output csv --catalog '" + cat + "' --script '" + (dir / "two.sql").string() + "'", dir);
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(r.out == "k,COUNT(*)\na,1\nb,2\n");

  // \save and \load from the REPL.
  std::string other = (dir / "other.owc").string();
  Run repl = owq("-q", dir, "\\load " + cat + "\n\\save " + other + "\nSELECT COUNT(*) FROM G;\n");
  CHECK_MESSAGE(repl.code == 0, repl.err);
  CHECK(fs::exists(other));
  CHECK(repl.out.find("3") != std::string::npos);
}

TEST_CASE("seeded experiments write byte-identical results") {
  auto dir = scratch("experiment");
  write(dir / "tiny.cfg", std::string(kQuickTraining) +
                              "spiral.population = 3000\nspiral.sample_size = 300\nexperiment.coverages = 0.2, 0.6\n"
                              "experiment.queries = 10\nexperiment.repeats = 2\nexperiment.output_dir = " +
                              (dir / "ignored").string() + "\n");
  auto run = [&](const std::string& stem) {
    std::string input = "\\config experiment.output_dir " + (dir / "out").string() + "\n\\config experiment.stem " + stem +
                        "\n\\seed 321\n\\experiment spiral " + (dir / "tiny.cfg").string() + "\n";
    Run r = owq("-q", dir, input);
    CHECK_MESSAGE(r.code == 0, r.err);
    CHECK_MESSAGE(r.err.empty(), r.err);
    return slurp(dir / "out" / (stem + ".csv"));
  };
  std::string a = run("a"), b = run("b");
  CHECK_FALSE(a.empty());
  CHECK(a == b);
  CHECK(a.find("seeds spiral=321") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "a.svg"));
  // Session settings take precedence over the experiment file.
  CHECK_FALSE(fs::exists(dir / "ignored"));
}

TEST_CASE("describe_error includes the code and location") {
  Error e(ErrorCode::SyntaxError, "expected ';'", SourceLocation{3, 7});
  std::string s = describe_error(e);
  CHECK(s.find("SyntaxError") != std::string::npos);
  CHECK(s.find("line 3") != std::string::npos);
}
