#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "openworld/catalog.hpp"
#include "openworld/executor.hpp"
#include "openworld/kv_config.hpp"

namespace ow {

enum class OutputFormat { Table, Csv };

struct CliConfig {
  std::string catalog_path;  // loaded at startup when it exists, written by \save
  std::optional<std::uint64_t> seed;  // overrides the catalog seed
  /// mswg.*, ipf.*, exec.*, output.*, experiment.* overrides.
  KvConfig overrides;
  OutputFormat output = OutputFormat::Table;
  bool quiet = false;

  /// Throws IoError when the catalog path cannot be written or the CSV
  /// output directory does not exist.
  void validate() const;
};

/// Exit codes of run_script and the REPL.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

/// One interactive or batch session: a catalog, an executor over it, and the
/// settings that shape both.
class Session {
 public:
  Session(CliConfig config, std::ostream& out, std::ostream& log);

  Catalog& catalog() { return catalog_; }
  const Catalog& catalog() const { return catalog_; }
  Executor& executor() { return *executor_; }
  const CliConfig& config() const { return config_; }
  std::uint64_t seed() const { return catalog_.seed(); }

  /// Parses and runs every statement of `text`. Relative INGEST paths
  /// resolve against `base_dir`. Stops at the first error (rethrown).
  void run_text(std::string_view text, const std::string& base_dir = ".");
  void run_statement(const sql::Statement& stmt, const std::string& base_dir = ".");
  QueryAnswer query(const sql::SelectQuery& q);

  /// Handles a backslash command. Returns false for \quit.
  bool run_meta(std::string_view line);

  void load(const std::string& path);
  void save(const std::string& path) const;
  void set_seed(std::uint64_t seed);
  void set_config(const std::string& key, const std::string& value);

  /// Answers printed so far, in order.
  const std::vector<QueryAnswer>& answers() const { return answers_; }

  /// Echo acknowledgements for DDL statements (REPL style).
  void set_echo(bool echo) { echo_ = echo; }

 private:
  void rebuild_executor();
  void emit(const QueryAnswer& answer);
  void ack(const std::string& text);
  void run_experiment(const std::string& which, const std::string& spec_path);

  CliConfig config_;
  std::ostream* out_;
  std::ostream* log_;
  Catalog catalog_;
  std::unique_ptr<Executor> executor_;
  std::vector<QueryAnswer> answers_;
  bool echo_ = false;
};

/// Non-interactive execution of a script file.
int run_script(const std::string& path, const CliConfig& config, std::ostream& out, std::ostream& err);
/// Runs an already loaded script text.
int run_script_text(std::string_view text, const std::string& base_dir, const CliConfig& config,
                    std::ostream& out, std::ostream& err);

/// Reads `;`-terminated statements and backslash commands until EOF or \quit.
/// Errors are reported and the loop continues. Returns 0 unless the final
/// \save fails.
int repl_loop(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err,
              bool interactive = false);

/// Human-readable error line with the code and, when known, the location.
std::string describe_error(const Error& e, std::string_view source = {});

}  // namespace ow
