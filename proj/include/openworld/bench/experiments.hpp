#pragma once

#include <functional>
#include <string>
#include <vector>

#include "openworld/bench/report.hpp"
#include "openworld/bench/synthetic.hpp"
#include "openworld/ipf.hpp"
#include "openworld/kv_config.hpp"
#include "openworld/mswg/trainer.hpp"

namespace ow::bench {

using LogFn = std::function<void(const std::string&)>;

struct SpiralExperimentSpec {
  SpiralSpec spiral;
  std::vector<double> coverages = {0.01, 0.2, 0.4, 0.6, 0.8};
  std::size_t queries = 100;
  std::size_t repeats = 10;
  std::size_t generated_rows = 0;  // 0 = sample size
  int bins = kDefaultBins;
  std::uint64_t query_seed = 7;
  std::uint64_t generation_seed = 11;
  mswg::TrainConfig train = mswg::TrainConfig::spiral();

  /// Keys: spiral.*, mswg.*, experiment.{coverages,queries,repeats,generated_rows,bins,query_seed,generation_seed}.
  void apply(const KvConfig& cfg);
  /// Re-derives every seed from one master seed.
  void reseed(std::uint64_t seed);
};

struct SpiralExperimentResult {
  ResultTable table;
  std::vector<std::string> attributes;
  std::vector<double> w1_generated;  // per attribute, first generated sample vs population
  std::vector<double> w1_sample;     // per attribute, biased sample vs population
  std::vector<mswg::EpochLog> history;
  double train_seconds = 0.0;
  double total_seconds = 0.0;
};

SpiralExperimentResult run_spiral_experiment(const SpiralExperimentSpec& spec, const LogFn& log = {});

struct FlightsExperimentSpec {
  FlightsLikeSpec flights;
  mswg::TrainConfig train = mswg::TrainConfig::flights();
  IpfConfig ipf;
  std::size_t open_samples = 10;
  bool run_mswg = true;
  std::uint64_t generation_seed = 11;

  /// Keys: flights.*, mswg.*, ipf.{max_rounds,tolerance,zero_policy}, experiment.{open_samples,run_mswg,generation_seed}.
  void apply(const KvConfig& cfg);
  void reseed(std::uint64_t seed);
};

struct FlightsQueryResult {
  int id = 0;
  std::string method;
  double error = 0.0;  // mean percent difference over returned groups; NaN when none returned
  std::size_t groups = 0;
  std::size_t false_negatives = 0;
  std::size_t excluded = 0;
};

struct FlightsExperimentResult {
  std::vector<std::string> queries;  // SQL for ids 1..8
  std::vector<FlightsQueryResult> rows;
  std::vector<std::string> comments;
  ResultTable table;  // one row per (query, method), summary over per-group errors
  double total_seconds = 0.0;

  const FlightsQueryResult* find(int id, const std::string& method) const;
};

/// The eight aggregate query templates (GROUP BY C restored for 5-8).
std::vector<std::string> flights_queries();

FlightsExperimentResult run_flightslike_experiment(const FlightsExperimentSpec& spec, const LogFn& log = {});

/// `query,method,percent_difference,groups,false_negatives,excluded` with comment lines.
std::string flights_csv(const FlightsExperimentResult& result);

/// Writes <dir>/<stem>.csv and <dir>/<stem>.svg; returns the CSV path.
std::string write_spiral_outputs(const SpiralExperimentResult& result, const std::string& dir,
                                 const std::string& stem = "spiral");
std::string write_flights_outputs(const FlightsExperimentResult& result, const std::string& dir,
                                  const std::string& stem = "flights");

}  // namespace ow::bench
