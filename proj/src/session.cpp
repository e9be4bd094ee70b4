#include "openworld/session.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "openworld/bench/experiments.hpp"
#include "openworld/parser.hpp"

namespace ow {

namespace fs = std::filesystem;

namespace {

std::string read_whole_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Offset one past the last `;` outside string literals and `--` comments,
/// or npos when the buffer holds no complete statement.
std::size_t statement_end(std::string_view text) {
  std::size_t end = std::string_view::npos;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\'') in_string = false;
    } else if (c == '\'') {
      in_string = true;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == ';') {
      end = i + 1;
    }
  }
  return end;
}

bool blank(std::string_view text) {
  // Comments alone do not make a statement.
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    std::string t = trim(line);
    if (!t.empty() && t.rfind("--", 0) != 0) return false;
  }
  return true;
}

}  // namespace

void CliConfig::validate() const {
  if (!catalog_path.empty()) {
    fs::path parent = fs::path(catalog_path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
      fail(ErrorCode::IoError, "catalog directory '" + parent.string() + "' does not exist");
    if (fs::exists(catalog_path) && fs::is_directory(catalog_path))
      fail(ErrorCode::IoError, "catalog path '" + catalog_path + "' is a directory");
  }
  if (auto dir = overrides.get("output.csv_dir"); dir && !fs::is_directory(*dir))
    fail(ErrorCode::IoError, "output.csv_dir '" + *dir + "' is not a directory");
}

std::string describe_error(const Error& e, std::string_view source) {
  std::string out;
  if (!source.empty()) {
    out += source;
    out += ": ";
  }
  out += "error: ";
  out += e.what();
  return out;
}

Session::Session(CliConfig config, std::ostream& out, std::ostream& log)
    : config_(std::move(config)), out_(&out), log_(&log) {
  config_.validate();
  if (!config_.catalog_path.empty() && fs::exists(config_.catalog_path)) catalog_ = Catalog::load(config_.catalog_path);
  if (config_.seed) catalog_.set_seed(*config_.seed);
  rebuild_executor();
}

void Session::rebuild_executor() {
  const KvConfig& ov = config_.overrides;
  ExecOptions o;
  o.seed = catalog_.seed();
  o.ipf.apply(ov);
  o.ipf_enabled = ov.get_bool("exec.ipf", true);
  o.open_samples = ov.get_u64("exec.open_samples", o.open_samples);
  if (o.open_samples == 0) fail(ErrorCode::ConfigError, "exec.open_samples must be >= 1");
  o.train.seed = catalog_.seed();
  o.train.apply(ov);
  if (!config_.quiet) {
    std::ostream* log = log_;
    o.progress = [log](const mswg::EpochLog& e) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "epoch %zu: loss %.6g (train %.6g) lr %.3g", e.epoch, e.loss, e.train_loss,
                    e.learning_rate);
      *log << buf << '\n';
    };
  }
  executor_ = std::make_unique<Executor>(catalog_, std::move(o));
}

void Session::ack(const std::string& text) {
  if (echo_ && !config_.quiet) *out_ << text << '\n';
}

void Session::emit(const QueryAnswer& answer) {
  answers_.push_back(answer);
  if (config_.output == OutputFormat::Csv) *out_ << format_csv(answer);
  else {
    if (answers_.size() > 1) *out_ << '\n';
    *out_ << format_table(answer);
  }
  out_->flush();
  if (auto dir = config_.overrides.get("output.csv_dir")) {
    std::string path = (fs::path(*dir) / ("answer_" + std::to_string(answers_.size()) + ".csv")).string();
    bench::write_text_file(path, format_csv(answer));
  }
}

QueryAnswer Session::query(const sql::SelectQuery& q) { return executor_->execute(q); }

void Session::run_statement(const sql::Statement& stmt, const std::string& base_dir) {
  try {
    std::visit(Overloaded{
                   [&](const sql::CreateTable& s) {
                     catalog_.create_table(s);
                     ack("created table " + s.name);
                   },
                   [&](const sql::CreatePopulation& s) {
                     catalog_.create_population(s);
                     ack("created population " + s.name);
                   },
                   [&](const sql::CreateSample& s) {
                     catalog_.create_sample(s);
                     ack("created sample " + s.name);
                   },
                   [&](const sql::CreateMetadata& s) {
                     catalog_.create_metadata(s);
                     ack("created metadata " + s.name);
                   },
                   [&](const sql::Ingest& s) {
                     std::size_t n = catalog_.ingest_csv(s.relation, resolve(s.path, base_dir));
                     ack("ingested " + std::to_string(n) + " rows into " + s.relation);
                   },
                   [&](const sql::SelectQuery& s) { emit(query(s)); },
               },
               stmt.body);
  } catch (const sql::SyntaxError&) {
    throw;
  } catch (const Error& e) {
    if (e.where().line > 0) throw;
    throw Error(e.code(), e.detail(), stmt.span.start);
  }
}

void Session::run_text(std::string_view text, const std::string& base_dir) {
  for (const auto& stmt : sql::parse(text)) run_statement(stmt, base_dir);
}

void Session::load(const std::string& path) {
  catalog_ = Catalog::load(path);
  if (config_.seed) catalog_.set_seed(*config_.seed);
  rebuild_executor();
}

void Session::save(const std::string& path) const { catalog_.save(path); }

void Session::set_seed(std::uint64_t seed) {
  config_.seed = seed;
  catalog_.set_seed(seed);
  rebuild_executor();
}

void Session::set_config(const std::string& key, const std::string& value) {
  CliConfig next = config_;
  if (key == "output") {
    if (value == "table") next.output = OutputFormat::Table;
    else if (value == "csv") next.output = OutputFormat::Csv;
    else fail(ErrorCode::ConfigError, "output must be table or csv");
  } else if (key == "quiet") {
    next.quiet = parse_bool(value, key);
  } else {
    next.overrides.set(key, value);
  }
  next.validate();
  CliConfig previous = std::exchange(config_, std::move(next));
  try {
    rebuild_executor();
  } catch (...) {
    config_ = std::move(previous);
    throw;
  }
}

void Session::run_experiment(const std::string& which, const std::string& spec_path) {
  KvConfig file;
  if (!spec_path.empty()) file = KvConfig::read_file(spec_path);
  auto setting = [&](const std::string& key, const std::string& fallback) {
    return config_.overrides.get_string(key, file.get_string(key, fallback));
  };
  std::string dir = setting("experiment.output_dir", "results");
  std::string stem = setting("experiment.stem", which);
  fs::create_directories(dir);
  bench::LogFn log;
  if (!config_.quiet) log = [this](const std::string& line) { *log_ << line << '\n'; };

  if (which == "spiral") {
    bench::SpiralExperimentSpec spec;
    spec.reseed(catalog_.seed());
    spec.apply(file);
    spec.apply(config_.overrides);
    auto res = bench::run_spiral_experiment(spec, log);
    std::string path = bench::write_spiral_outputs(res, dir, stem);
    *out_ << bench::result_csv(res.table);
    *out_ << "wrote " << path << '\n';
  } else if (which == "flights") {
    bench::FlightsExperimentSpec spec;
    spec.reseed(catalog_.seed());
    spec.apply(file);
    spec.apply(config_.overrides);
    auto res = bench::run_flightslike_experiment(spec, log);
    std::string path = bench::write_flights_outputs(res, dir, stem);
    *out_ << bench::result_csv(res.table);
    *out_ << "wrote " << path << '\n';
  } else {
    fail(ErrorCode::ConfigError, "unknown experiment '" + which + "' (expected spiral or flights)");
  }
}

bool Session::run_meta(std::string_view line) {
  auto words = split_words(line);
  if (words.empty()) return true;
  const std::string& cmd = words[0];
  auto need = [&](std::size_t n, const char* usage) {
    if (words.size() != n) fail(ErrorCode::ConfigError, std::string("usage: ") + usage);
  };
  if (cmd == "\\quit" || cmd == "\\q") return false;
  if (cmd == "\\load") {
    need(2, "\\load <file>");
    load(words[1]);
    ack("loaded " + words[1]);
  } else if (cmd == "\\save") {
    if (words.size() > 2) fail(ErrorCode::ConfigError, "usage: \\save [file]");
    std::string path = words.size() == 2 ? words[1] : config_.catalog_path;
    if (path.empty()) fail(ErrorCode::ConfigError, "no catalog path; use \\save <file> or --catalog");
    save(path);
    ack("saved " + path);
  } else if (cmd == "\\seed") {
    need(2, "\\seed <n>");
    auto v = parse_int(words[1], "seed");
    if (v < 0) fail(ErrorCode::ConfigError, "seed must be nonnegative");
    set_seed(static_cast<std::uint64_t>(v));
    ack("seed " + words[1]);
  } else if (cmd == "\\config") {
    if (words.size() < 3) fail(ErrorCode::ConfigError, "usage: \\config <key> <value>");
    std::string value = words[2];
    for (std::size_t i = 3; i < words.size(); ++i) value += " " + words[i];
    set_config(words[1], value);
    ack(words[1] + " = " + value);
  } else if (cmd == "\\train") {
    need(2, "\\train <sample>");
    auto gen = executor_->retrain(words[1]);
    *out_ << "trained generator for " << words[1] << ": " << gen->history.size() << " epochs, best loss "
          << format_number(gen->best_loss) << '\n';
  } else if (cmd == "\\experiment") {
    if (words.size() != 2 && words.size() != 3) fail(ErrorCode::ConfigError, "usage: \\experiment spiral|flights [spec-file]");
    run_experiment(words[1], words.size() == 3 ? words[2] : std::string());
  } else if (cmd == "\\help") {
    *out_ << "statements end with ';'\n"
             "\\load <file>  \\save [file]  \\seed <n>  \\config <key> <value>\n"
             "\\train <sample>  \\experiment spiral|flights [spec-file]  \\quit\n";
  } else {
    fail(ErrorCode::ConfigError, "unknown command '" + cmd + "' (try \\help)");
  }
  return true;
}

int run_script_text(std::string_view text, const std::string& base_dir, const CliConfig& config, std::ostream& out,
                    std::ostream& err) {
  try {
    Session session(config, out, err);
    session.run_text(text, base_dir);
    if (!config.catalog_path.empty()) session.save(config.catalog_path);
    return kExitOk;
  } catch (const Error& e) {
    err << describe_error(e) << '\n';
    return e.code() == ErrorCode::Internal ? kExitInternalError : kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}

int run_script(const std::string& path, const CliConfig& config, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    text = read_whole_file(path);
  } catch (const Error& e) {
    err << describe_error(e) << '\n';
    return kExitUserError;
  }
  std::string base = fs::path(path).parent_path().string();
  return run_script_text(text, base.empty() ? "." : base, config, out, err);
}

int repl_loop(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err, bool interactive) {
  std::unique_ptr<Session> session;
  try {
    session = std::make_unique<Session>(config, out, err);
  } catch (const Error& e) {
    err << describe_error(e) << '\n';
    return kExitUserError;
  }
  session->set_echo(interactive);
  std::string buffer;
  auto prompt = [&] {
    if (interactive) out << (blank(buffer) ? "owq> " : "...> ") << std::flush;
  };
  auto guarded = [&](auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      err << describe_error(e) << '\n';
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << '\n';
    }
  };
  bool running = true;
  prompt();
  for (std::string line; running && std::getline(in, line);) {
    std::string t = trim(line);
    if (blank(buffer) && !t.empty() && t[0] == '\\') {
      buffer.clear();
      guarded([&] { running = session->run_meta(t); });
    } else {
      buffer += line;
      buffer += '\n';
      std::size_t end = statement_end(buffer);
      if (end != std::string::npos) {
        std::string text = buffer.substr(0, end);
        buffer.erase(0, end);
        guarded([&] { session->run_text(text, "."); });
      }
    }
    if (running) prompt();
  }
  if (!blank(buffer)) err << "warning: discarding unterminated statement\n";
  if (!config.catalog_path.empty()) {
    try {
      session->save(config.catalog_path);
    } catch (const Error& e) {
      err << describe_error(e) << '\n';
      return kExitUserError;
    }
  }
  return kExitOk;
}

}  // namespace ow
