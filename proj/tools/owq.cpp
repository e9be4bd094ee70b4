// owq: batch runner and REPL for the open-world query dialect.

#include <unistd.h>

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "openworld/session.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Open-world query engine over biased samples"};
  std::string script;
  std::string config_file;
  std::uint64_t seed = 0;
  ow::CliConfig cfg;
  std::map<std::string, ow::OutputFormat> formats{{"table", ow::OutputFormat::Table}, {"csv", ow::OutputFormat::Csv}};

  app.add_option("--catalog", cfg.catalog_path, "Catalog file, loaded if present and saved on exit");
  app.add_option("--script", script, "Run a script non-interactively")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed for training and generation");
  app.add_option("--config", config_file, "key = value settings file")->check(CLI::ExistingFile);
  app.add_option("--output", cfg.output, "Answer format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app.add_flag("--quiet,-q", cfg.quiet, "Suppress progress and acknowledgements");
  CLI11_PARSE(app, argc, argv);

  if (*seed_opt) cfg.seed = seed;
  try {
    if (!config_file.empty()) cfg.overrides = ow::KvConfig::read_file(config_file);
    cfg.validate();
  } catch (const ow::Error& e) {
    std::cerr << ow::describe_error(e) << '\n';
    return ow::kExitUserError;
  }

  if (!script.empty()) return ow::run_script(script, cfg, std::cout, std::cerr);
  return ow::repl_loop(cfg, std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0);
}
