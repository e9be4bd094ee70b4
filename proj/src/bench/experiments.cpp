#include "openworld/bench/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "openworld/catalog.hpp"
#include "openworld/csv.hpp"
#include "openworld/error.hpp"
#include "openworld/executor.hpp"
#include "openworld/mswg/marginals.hpp"
#include "openworld/mswg/wasserstein.hpp"
#include "openworld/parser.hpp"

namespace ow::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void say(const LogFn& log, const std::string& msg) {
  if (log) log(msg);
}

mswg::ProgressFn epoch_logger(const LogFn& log) {
  if (!log) return {};
  return [log](const mswg::EpochLog& e) {
    std::ostringstream os;
    os << "epoch " << e.epoch << " loss " << format_number(e.loss) << " train_loss " << format_number(e.train_loss)
       << " lr " << format_number(e.learning_rate);
    log(os.str());
  };
}

std::string train_comment(const mswg::TrainConfig& c) { return "train " + c.fingerprint(); }

}  // namespace

void SpiralExperimentSpec::apply(const KvConfig& cfg) {
  spiral.apply(cfg);
  train.apply(cfg);
  coverages = cfg.get_doubles("experiment.coverages", coverages);
  queries = cfg.get_u64("experiment.queries", queries);
  repeats = cfg.get_u64("experiment.repeats", repeats);
  generated_rows = cfg.get_u64("experiment.generated_rows", generated_rows);
  bins = static_cast<int>(cfg.get_int("experiment.bins", bins));
  query_seed = cfg.get_u64("experiment.query_seed", query_seed);
  generation_seed = cfg.get_u64("experiment.generation_seed", generation_seed);
  if (repeats == 0 || queries == 0) fail(ErrorCode::ConfigError, "experiment needs queries > 0 and repeats > 0");
  if (bins < 1) fail(ErrorCode::ConfigError, "experiment.bins must be >= 1");
  for (double c : coverages) RangeQuerySpec{c, queries, 0}.validate();
}

void SpiralExperimentSpec::reseed(std::uint64_t seed) {
  spiral.seed = seed;
  train.seed = seed + 1;
  query_seed = seed + 2;
  generation_seed = seed + 3;
}

SpiralExperimentResult run_spiral_experiment(const SpiralExperimentSpec& spec, const LogFn& log) {
  const auto t0 = Clock::now();
  SpiralExperimentResult res;
  SpiralData data = gen_spiral(spec.spiral);
  say(log, "spiral: " + std::to_string(data.population.rows()) + " population rows, " +
               std::to_string(data.sample.rows()) + " sample rows");
  std::vector<Marginal> marginals;
  for (const auto& a : data.population.schema())
    marginals.push_back(marginal_from_table(data.population, "spiral_" + a.name, "spiral", {a.name}, {}, spec.bins));
  marginals = mswg::augment_marginals(marginals, data.sample);

  const auto t_train = Clock::now();
  mswg::Generator gen = mswg::train(data.sample, marginals, spec.train, epoch_logger(log));
  res.train_seconds = seconds_since(t_train);
  res.history = gen.history;
  say(log, "trained in " + format_number(std::round(res.train_seconds * 10) / 10) + " s");

  const std::size_t n_gen = spec.generated_rows ? spec.generated_rows : data.sample.rows();
  mswg::Rng grng(spec.generation_seed);
  std::vector<Table> generated;
  for (std::size_t i = 0; i < spec.repeats; ++i) generated.push_back(mswg::generate(gen, n_gen, grng));

  for (std::size_t c = 0; c < data.population.cols(); ++c) {
    res.attributes.push_back(data.population.schema()[c].name);
    res.w1_generated.push_back(mswg::wasserstein_1d(data.population.column(c), {}, generated.front().column(c)));
    res.w1_sample.push_back(mswg::wasserstein_1d(data.population.column(c), {}, data.sample.column(c)));
    say(log, "W1 " + res.attributes.back() + ": generated " + format_number(res.w1_generated.back()) + ", sample " +
                 format_number(res.w1_sample.back()));
  }

  const double N = static_cast<double>(data.population.rows());
  const double unif_w = N / static_cast<double>(data.sample.rows());
  const double gen_w = N / static_cast<double>(n_gen);
  res.table.key_name = "coverage";
  std::ostringstream seeds;
  seeds << "seeds spiral=" << spec.spiral.seed << " train=" << spec.train.seed << " query=" << spec.query_seed
        << " generation=" << spec.generation_seed;
  res.table.comments.push_back(seeds.str());
  std::ostringstream sp;
  sp << "spiral population=" << spec.spiral.population << " sample=" << spec.spiral.sample_size
     << " arms=" << spec.spiral.arms << " theta=[" << format_number(spec.spiral.theta_min) << ","
     << format_number(spec.spiral.theta_max) << "] b=" << format_number(spec.spiral.b)
     << " sigma=" << format_number(spec.spiral.sigma) << " gamma=" << format_number(spec.spiral.gamma);
  res.table.comments.push_back(sp.str());
  res.table.comments.push_back(train_comment(spec.train));
  res.table.comments.push_back("queries=" + std::to_string(spec.queries) + " repeats=" + std::to_string(spec.repeats) +
                               " generated_rows=" + std::to_string(n_gen) + " bins=" + std::to_string(spec.bins));

  for (std::size_t ci = 0; ci < spec.coverages.size(); ++ci) {
    const double cov = spec.coverages[ci];
    auto boxes = gen_range_queries(data.population, {cov, spec.queries, spec.query_seed + ci});
    std::vector<double> unif, mswg_err;
    std::size_t unif_ex = 0, mswg_ex = 0;
    for (const auto& q : boxes) {
      double truth = box_count(data.population, q);
      if (auto pd = percent_difference(box_count(data.sample, q) * unif_w, truth)) unif.push_back(*pd);
      else ++unif_ex;
      double sum = 0.0;
      std::size_t used = 0;
      for (const auto& g : generated)
        if (auto pd = percent_difference(box_count(g, q) * gen_w, truth)) sum += *pd, ++used;
      if (used) mswg_err.push_back(sum / static_cast<double>(used));
      else ++mswg_ex;
    }
    res.table.rows.push_back({format_number(cov), "unif", summarize(unif, unif_ex)});
    res.table.rows.push_back({format_number(cov), "mswg", summarize(mswg_err, mswg_ex)});
    say(log, "coverage " + format_number(cov) + ": unif mean " + format_number(res.table.rows[res.table.rows.size() - 2].summary.mean) +
                 ", mswg mean " + format_number(res.table.rows.back().summary.mean));
  }
  res.total_seconds = seconds_since(t0);
  return res;
}

void FlightsExperimentSpec::apply(const KvConfig& cfg) {
  flights.apply(cfg);
  train.apply(cfg);
  ipf.apply(cfg);
  open_samples = cfg.get_u64("experiment.open_samples", open_samples);
  run_mswg = cfg.get_bool("experiment.run_mswg", run_mswg);
  generation_seed = cfg.get_u64("experiment.generation_seed", generation_seed);
}

void FlightsExperimentSpec::reseed(std::uint64_t seed) {
  flights.seed = seed;
  train.seed = seed + 1;
  generation_seed = seed + 3;
}

std::vector<std::string> flights_queries() {
  return {
      "SELECT AVG(D) FROM F WHERE E > 200;",
      "SELECT AVG(I) FROM F WHERE E < 200;",
      "SELECT AVG(E) FROM F WHERE D > 1000;",
      "SELECT AVG(O) FROM F WHERE D < 1000;",
      "SELECT C, AVG(D) FROM F WHERE E > 200 AND C IN ['WN', 'AA'] GROUP BY C;",
      "SELECT C, AVG(I) FROM F WHERE E < 200 AND C IN ['WN', 'AA'] GROUP BY C;",
      "SELECT C, AVG(E) FROM F WHERE D > 1000 AND C IN ['WN', 'AA'] GROUP BY C;",
      "SELECT C, AVG(O) FROM F WHERE D < 1000 AND C IN ['US', 'F9'] GROUP BY C;",
  };
}

const FlightsQueryResult* FlightsExperimentResult::find(int id, const std::string& method) const {
  for (const auto& r : rows)
    if (r.id == id && r.method == method) return &r;
  return nullptr;
}

namespace {

struct KeyLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
  }
};

FlightsQueryResult compare(int id, const std::string& method, const QueryAnswer& truth, const QueryAnswer& est,
                           std::vector<double>& per_group) {
  FlightsQueryResult r;
  r.id = id;
  r.method = method;
  std::map<std::vector<Value>, double, KeyLess> got;
  auto ekeys = est.keys();
  for (std::size_t i = 0; i < est.rows.size(); ++i) got[ekeys[i]] = std::get<double>(est.rows[i].back());
  auto tkeys = truth.keys();
  per_group.clear();
  for (std::size_t i = 0; i < truth.rows.size(); ++i) {
    auto it = got.find(tkeys[i]);
    if (it == got.end() || std::isnan(it->second)) {
      ++r.false_negatives;
      continue;
    }
    ++r.groups;
    if (auto pd = percent_difference(it->second, std::get<double>(truth.rows[i].back()))) per_group.push_back(*pd);
    else ++r.excluded;
  }
  double s = 0.0;
  for (double v : per_group) s += v;
  r.error = per_group.empty() ? std::nan("") : s / static_cast<double>(per_group.size());
  return r;
}

}  // namespace

FlightsExperimentResult run_flightslike_experiment(const FlightsExperimentSpec& spec, const LogFn& log) {
  const auto t0 = Clock::now();
  FlightsData data = gen_flightslike(spec.flights);
  say(log, "flights: " + std::to_string(data.population.rows()) + " population rows, " +
               std::to_string(data.sample.rows()) + " sample rows");

  Catalog catalog;
  PopulationDef gp;
  gp.name = "F";
  gp.is_global = true;
  gp.schema = data.population.schema();
  for (auto& a : gp.schema) a.domain.clear();
  gp.schema_declared = true;
  catalog.create_population(gp);
  sql::ViewDef view;
  view.star = true;
  view.source = "F";
  catalog.create_sample("FS", {}, view, std::nullopt);
  catalog.ingest_table("FS", data.sample);
  for (auto m : data.marginals) {
    m.owner = "F";
    m.name = "F_" + m.attributes[0] + m.attributes[1];
    catalog.add_marginal(std::move(m));
  }

  ExecOptions opts;
  opts.ipf = spec.ipf;
  opts.train = spec.train;
  opts.open_samples = spec.open_samples;
  opts.seed = spec.generation_seed;
  opts.progress = epoch_logger(log);
  Executor exec(catalog, opts);

  FlightsExperimentResult res;
  res.queries = flights_queries();
  std::ostringstream seeds;
  seeds << "seeds flights=" << spec.flights.seed << " train=" << spec.train.seed << " generation=" << spec.generation_seed;
  res.comments.push_back(seeds.str());
  res.comments.push_back("flights population=" + std::to_string(spec.flights.population) +
                         " bias_threshold=" + format_number(spec.flights.bias_threshold) +
                         " bias_rate=" + format_number(spec.flights.bias_rate) +
                         " sample_fraction=" + format_number(spec.flights.sample_fraction));
  if (spec.run_mswg) res.comments.push_back(train_comment(spec.train));
  res.comments.push_back("open_samples=" + std::to_string(spec.open_samples) +
                         " ipf_tolerance=" + format_number(spec.ipf.tolerance));
  res.table.key_name = "query";
  res.table.comments = res.comments;

  const SampleRelation& sample = *catalog.find_sample("FS");
  const double unif_w = static_cast<double>(data.population.rows()) / static_cast<double>(sample.rows());
  std::vector<double> per_group;
  for (std::size_t qi = 0; qi < res.queries.size(); ++qi) {
    const int id = static_cast<int>(qi) + 1;
    auto stmts = sql::parse(res.queries[qi]);
    sql::SelectQuery q = std::get<sql::SelectQuery>(stmts.at(0).body);
    QueryAnswer truth = aggregate(q, {&data.population, std::vector<double>(data.population.rows(), 1.0)}, true, false);

    QueryAnswer unif = aggregate(q, {&sample.data, std::vector<double>(sample.rows(), unif_w)}, false, true);
    auto add = [&](const std::string& method, const QueryAnswer& est) {
      res.rows.push_back(compare(id, method, truth, est, per_group));
      res.table.rows.push_back({std::to_string(id), method, summarize(per_group, res.rows.back().excluded)});
      std::ostringstream os;
      os << "query " << id << " " << method << ": error " << format_number(res.rows.back().error) << " ("
         << res.rows.back().groups << " groups, " << res.rows.back().false_negatives << " missing)";
      say(log, os.str());
    };
    add("unif", unif);
    q.visibility = sql::Visibility::SemiOpen;
    add("ipf", exec.execute(q));
    if (spec.run_mswg) {
      q.visibility = sql::Visibility::Open;
      add("mswg", exec.execute(q));
    }
  }
  res.total_seconds = seconds_since(t0);
  return res;
}

std::string flights_csv(const FlightsExperimentResult& result) {
  std::ostringstream os;
  for (const auto& c : result.comments) os << "# " << c << '\n';
  csv::write_row(os, {"query", "method", "percent_difference", "groups", "false_negatives", "excluded"});
  for (const auto& r : result.rows)
    csv::write_row(os, {std::to_string(r.id), r.method, format_number(r.error), std::to_string(r.groups),
                        std::to_string(r.false_negatives), std::to_string(r.excluded)});
  return os.str();
}

std::string write_spiral_outputs(const SpiralExperimentResult& result, const std::string& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::string csv_path = (std::filesystem::path(dir) / (stem + ".csv")).string();
  emit_csv(result.table, csv_path);
  emit_svg_boxplot(result.table, (std::filesystem::path(dir) / (stem + ".svg")).string(),
                   "Range-query percent difference by width coverage");
  return csv_path;
}

std::string write_flights_outputs(const FlightsExperimentResult& result, const std::string& dir,
                                  const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::string csv_path = (std::filesystem::path(dir) / (stem + ".csv")).string();
  write_text_file(csv_path, flights_csv(result));
  emit_csv(result.table, (std::filesystem::path(dir) / (stem + "_summary.csv")).string());
  emit_svg_boxplot(result.table, (std::filesystem::path(dir) / (stem + ".svg")).string(),
                   "Flights-like query percent difference by method");
  return csv_path;
}

}  // namespace ow::bench
