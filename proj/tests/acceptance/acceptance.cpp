// Acceptance gates. Prints one PASS/FAIL line per criterion; exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "openworld/bench/experiments.hpp"
#include "openworld/error.hpp"
#include "openworld/executor.hpp"
#include "openworld/ipf.hpp"
#include "openworld/kernels.hpp"
#include "openworld/mswg/coverage.hpp"
#include "openworld/mswg/loss.hpp"
#include "openworld/mswg/marginals.hpp"
#include "openworld/mswg/wasserstein.hpp"
#include "openworld/session.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace ow;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, const char* f = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> uniform(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome transport_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  const int instances = 200;
  for (int i = 0; i < instances; ++i) {
    std::size_t n = 1 + rng() % 8, m = 1 + rng() % 8;
    auto px = uniform(n, rng, -10, 10), qx = uniform(m, rng, -10, 10);
    auto pw = uniform(n, rng, 0.01, 3), qw = uniform(m, rng, 0.01, 3);
    double lp = oracle::transport_lp(px, pw, qx, qw);
    double got = mswg::wasserstein_1d(px, pw, qx, qw);
    worst = std::max(worst, std::abs(got - lp));
  }
  double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 5.0,
          std::to_string(instances) + " instances, max |W1 - LP| = " + fmt(worst) + ", " + fmt(secs, "%.2f") + " s"};
}

// ---------------------------------------------------------------------------

Table numeric_xy(const std::vector<double>& flat) {
  Table t({AttributeDef{"x", AttributeKind::Numeric, {}, {}}, AttributeDef{"y", AttributeKind::Numeric, {}, {}}});
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
    std::vector<Value> r{flat[i], flat[i + 1]};
    t.append_row(r);
  }
  return t;
}

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  double worst_transport = 0, worst_coverage = 0, worst_full = 0;
  for (int trial = 0; trial < 10; ++trial) {
    // Sample and marginals over (x, y): a sliced joint and a 1-D x marginal.
    Table sample = numeric_xy(uniform(40, rng, 0, 10));
    Marginal joint{"xy", "P", {"x", "y"}, {AttributeKind::Numeric, AttributeKind::Numeric}, {std::nullopt, std::nullopt}, {}};
    auto pts = uniform(16, rng, 0, 10);
    auto mass = uniform(8, rng, 0.5, 5);
    for (std::size_t c = 0; c < 8; ++c) joint.cells.push_back({{pts[2 * c], pts[2 * c + 1]}, mass[c]});
    Marginal mx{"x", "P", {"x"}, {AttributeKind::Numeric}, {std::nullopt}, {}};
    for (double v : uniform(5, rng, 0, 10)) mx.cells.push_back({{v}, 1.0 + static_cast<double>(rng() % 5)});
    std::vector<Marginal> marginals = {joint, mx};
    mswg::Encoding enc = mswg::Encoding::build(sample, marginals);
    std::vector<mswg::PreparedMarginal> prepared;
    std::vector<mswg::TransportTarget> targets;
    std::vector<mswg::ProjectionSet> projections;
    mswg::Rng prng(trial);
    for (const auto& m : marginals) {
      prepared.push_back(mswg::prepare_marginal(m, enc));
      targets.push_back(mswg::exact_target(prepared.back()));
      projections.push_back(prepared.back().sliced() ? mswg::sample_projections(9, 2, prng) : mswg::ProjectionSet{});
    }
    const std::size_t n = 7, d = enc.dim();
    auto batch = uniform(n * d, rng, -0.1, 1.1);

    // (a) Transport terms.
    for (std::size_t i = 0; i < prepared.size(); ++i) {
      const mswg::ProjectionSet* proj = prepared[i].sliced() ? &projections[i] : nullptr;
      std::vector<double> g(n * d, 0.0);
      mswg::transport_term(batch, n, d, prepared[i], targets[i], proj, 1.0, &g);
      auto f = [&](const std::vector<double>& x) {
        return mswg::transport_term(x, n, d, prepared[i], targets[i], proj, 1.0, nullptr);
      };
      worst_transport = std::max(worst_transport, oracle::max_relative_error(g, oracle::central_gradient(f, batch, 1e-7), 1e-3));
    }

    // (b) Coverage penalty.
    std::vector<double> encoded = enc.encode(sample);
    auto cov = mswg::coverage_penalty(batch, n, encoded, sample.rows(), d, 0, nullptr);
    auto fc = [&](const std::vector<double>& x) {
      return mswg::coverage_penalty(x, n, encoded, sample.rows(), d, 0, nullptr).value;
    };
    worst_coverage = std::max(worst_coverage, oracle::max_relative_error(cov.grad, oracle::central_gradient(fc, batch, 1e-7), 1e-3));

    // (c) Full loss through a generator with two hidden layers.
    mswg::LossContext ctx;
    ctx.marginals = &prepared;
    ctx.targets = &targets;
    ctx.projections = &projections;
    ctx.sample = encoded;
    ctx.sample_rows = sample.rows();
    ctx.lambda = 0.04;
    mswg::Rng nrng(trial + 50);
    mswg::GeneratorNet net(mswg::NetSpec{2, d, {6, 6}, true, {}}, nrng);
    std::normal_distribution<double> normal;
    std::vector<double> z(8 * 2);
    for (auto& v : z) v = normal(nrng);
    mswg::loss_and_grad(net, z, 8, ctx);
    std::vector<double> analytic, numeric;
    auto params = net.parameters();
    auto grads = net.gradients();
    auto value = [&] { return mswg::evaluate_loss(net.forward(z, 8, true), 8, d, ctx, nullptr).total; };
    const double h = 1e-6;
    for (std::size_t k = 0; k < params.size(); ++k)
      for (std::size_t i = 0; i < params[k].size(); ++i) {
        analytic.push_back(grads[k][i]);
        double keep = params[k][i];
        params[k][i] = keep + h;
        double up = value();
        params[k][i] = keep - h;
        double down = value();
        params[k][i] = keep;
        numeric.push_back((up - down) / (2 * h));
      }
    worst_full = std::max(worst_full, oracle::max_relative_error(analytic, numeric, 1e-3));
  }
  double secs = seconds_since(t0);
  bool ok = worst_transport < 1e-3 && worst_coverage < 1e-3 && worst_full < 1e-3 && secs < 30.0;
  return {ok, "max relative error: transport " + fmt(worst_transport) + ", coverage " + fmt(worst_coverage) +
                  ", full loss " + fmt(worst_full) + ", " + fmt(secs, "%.2f") + " s"};
}

// ---------------------------------------------------------------------------

Outcome ipf_exactness() {
  // Single 1-D marginal on random instances.
  std::mt19937_64 rng(5);
  double worst_single = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Table t({AttributeDef{"A", AttributeKind::Categorical, {}, {}}});
    for (int i = 0; i < 40; ++i) {
      std::vector<Value> r{std::string("a") + std::to_string(rng() % 5)};
      t.append_row(r);
    }
    auto m = marginal_from_table(t, "m", "P", {"A"});
    for (auto& c : m.cells) c.count = 1.0 + static_cast<double>(rng() % 1000);
    auto fit = ipf_fit(t, uniform(t.rows(), rng, 0.1, 2.0), {m});
    worst_single = std::max(worst_single, discrepancy(t, fit.weights, m));
  }

  // 10,000-row population with correlated attributes and a biased 10% sample.
  Catalog cat;
  support::ddl(cat, "CREATE GLOBAL POPULATION G (A TEXT, B TEXT); CREATE SAMPLE S AS (SELECT * FROM G);");
  const int ka = 5, kb = 4;
  std::vector<std::pair<int, int>> pop;
  std::discrete_distribution<int> pa({30, 25, 20, 15, 10});
  for (int i = 0; i < 10000; ++i) {
    int a = pa(rng);
    int b = std::discrete_distribution<int>({4.0 + a, 3.0, 2.0, 1.0 + a})(rng);
    pop.push_back({a, b});
  }
  std::vector<double> incl;
  for (auto [a, b] : pop) incl.push_back(std::pow(1.8, a) * (b == 0 ? 3.0 : 1.0));
  auto picks = bench::weighted_sample_without_replacement(incl, 1000, 17);
  Table ptable({AttributeDef{"A", AttributeKind::Categorical, {}, {}}, AttributeDef{"B", AttributeKind::Categorical, {}, {}}});
  for (auto [a, b] : pop) {
    std::vector<Value> r{"a" + std::to_string(a), "b" + std::to_string(b)};
    ptable.append_row(r);
  }
  std::vector<std::vector<std::string>> rows;
  for (auto r : picks) rows.push_back({"a" + std::to_string(pop[r].first), "b" + std::to_string(pop[r].second)});
  cat.ingest_rows("S", {"A", "B"}, rows);
  for (const char* attr : {"A", "B"}) {
    Marginal m = marginal_from_table(ptable, std::string("G_") + attr, "G", {attr});
    cat.add_marginal(m);
  }
  ExecOptions o;
  o.ipf.tolerance = 1e-6;
  Executor ex(cat, o);
  auto q = support::select("SELECT SEMI-OPEN A, B, COUNT(*) FROM G GROUP BY A, B;");
  auto ans = ex.execute(q);
  auto truth = oracle::group_counts(ptable, {"A", "B"});
  auto ipf = support::by_key(ans);
  auto sample_counts = oracle::group_counts(cat.find_sample("S")->data, {"A", "B"});
  double ipf_err = 0, unif_err = 0;
  for (const auto& [k, n] : truth) {
    double e = ipf.count(k) ? ipf[k][0] : 0.0;
    double u = sample_counts.count(k) ? sample_counts[k] * 10.0 : 0.0;
    ipf_err += std::abs(e - n) / n / truth.size();
    unif_err += std::abs(u - n) / n / truth.size();
  }
  bool converged = ans.ipf && ans.ipf->converged && ans.ipf->max_discrepancy() <= 1e-6;
  (void)ka;
  (void)kb;
  bool ok = worst_single <= 1e-9 && converged && ipf_err < unif_err;
  return {ok, "single-marginal discrepancy " + fmt(worst_single) + "; 2-attribute fit " +
                  (converged ? "converged" : "did not converge") + " in " +
                  std::to_string(ans.ipf ? ans.ipf->rounds : 0) + " rounds, mean relative COUNT error IPF " +
                  fmt(ipf_err) + " vs uniform " + fmt(unif_err)};
}

// ---------------------------------------------------------------------------

Outcome mechanism_weighting() {
  std::string detail;
  bool ok = true;
  for (std::size_t n : {0u, 1u, 7u, 123u, 1000u, 4321u}) {
    Catalog cat;
    support::ddl(cat, "CREATE GLOBAL POPULATION G (k TEXT); "
                      "CREATE SAMPLE S AS (SELECT * FROM G USING MECHANISM UNIFORM PERCENT 10);");
    std::vector<std::vector<std::string>> rows(n, {"x"});
    cat.ingest_rows("S", {"k"}, rows);
    Executor ex(cat, ExecOptions{});
    auto a = ex.execute(support::select("SELECT SEMI-OPEN COUNT(*) FROM G;"));
    double got = a.rows.size() == 1 ? std::get<double>(a.rows[0][0]) : -1.0;
    ok = ok && got == static_cast<double>(n) * 10.0;
    detail += (detail.empty() ? "" : ", ") + std::to_string(n) + " -> " + format_number(got);
  }
  return {ok, "COUNT(*) per sample size: " + detail};
}

// ---------------------------------------------------------------------------

/// Random catalog for visibility fuzzing: G(a, b, v) and one sample whose
/// value domains are a strict subset of the marginals'.
Catalog fuzz_catalog(std::mt19937_64& rng, const std::string& mechanism, bool with_marginals) {
  Catalog cat;
  support::ddl(cat, "CREATE GLOBAL POPULATION G (a TEXT, b TEXT, v REAL);"
                    "CREATE POPULATION P AS (SELECT * FROM G WHERE a IN ('a0', 'a1', 'a2'));"
                    "CREATE SAMPLE S AS (SELECT * FROM G" + mechanism + ");");
  std::vector<std::vector<std::string>> rows;
  std::size_t n = 5 + rng() % 60;
  for (std::size_t i = 0; i < n; ++i)
    rows.push_back({"a" + std::to_string(rng() % 4), "b" + std::to_string(rng() % 3), std::to_string(rng() % 50)});
  cat.ingest_rows("S", {"a", "b", "v"}, rows);
  if (with_marginals) {
    std::vector<MarginalCell> ca, cb;
    for (int i = 0; i < 6; ++i) ca.push_back({{"a" + std::to_string(i)}, 10.0 + static_cast<double>(rng() % 90)});
    for (int i = 0; i < 4; ++i) cb.push_back({{"b" + std::to_string(i)}, 10.0 + static_cast<double>(rng() % 90)});
    double ta = 0, tb = 0;
    for (auto& c : ca) ta += c.count;
    for (auto& c : cb) tb += c.count;
    for (auto& c : cb) c.count *= ta / tb;
    cat.create_metadata("G", {"a"}, ca, "G_a");
    cat.create_metadata("G", {"b"}, cb, "G_b");
  }
  return cat;
}

std::string fuzz_query(std::mt19937_64& rng, std::vector<std::string>& group) {
  static const std::vector<std::string> attrs = {"a", "b"};
  group.clear();
  for (const auto& a : attrs)
    if (rng() % 2) group.push_back(a);
  std::vector<std::string> items = group;
  static const std::vector<std::string> aggs = {"COUNT(*)", "SUM(v)", "AVG(v)"};
  std::size_t na = 1 + rng() % 2;
  for (std::size_t i = 0; i < na; ++i) items.push_back(aggs[rng() % aggs.size()]);
  std::shuffle(items.begin(), items.end(), rng);
  // Answer keys follow the select-list order.
  group.clear();
  for (const auto& it : items)
    if (std::find(attrs.begin(), attrs.end(), it) != attrs.end()) group.push_back(it);
  std::string sel;
  for (const auto& it : items) sel += (sel.empty() ? "" : ", ") + it;
  std::vector<std::string> atoms;
  if (rng() % 2) atoms.push_back("a = 'a" + std::to_string(rng() % 5) + "'");
  if (rng() % 2) atoms.push_back("b IN ('b" + std::to_string(rng() % 4) + "', 'b" + std::to_string(rng() % 4) + "')");
  if (rng() % 2) atoms.push_back("v " + std::string(rng() % 2 ? ">" : "<=") + " " + std::to_string(rng() % 50));
  std::string where;
  for (const auto& a : atoms) where += (where.empty() ? " WHERE " : " AND ") + a;
  std::string gb;
  for (const auto& g : group) gb += (gb.empty() ? " GROUP BY " : ", ") + g;
  return sel + " FROM " + std::string(rng() % 3 ? "G" : "P") + where + gb + ";";
}

Outcome visibility_contract() {
  std::mt19937_64 rng(31337);
  std::size_t queries = 0, invented = 0, mismatches = 0, answered = 0;
  for (int c = 0; c < 60; ++c) {
    // (i) reweighted, (ii) weights exactly 1 via mechanism, (iii) weights 1 with reweighting off.
    Catalog reweighted = fuzz_catalog(rng, "", true);
    Catalog unit_mech = fuzz_catalog(rng, " USING MECHANISM UNIFORM PERCENT 100", false);
    Catalog unit_plain = fuzz_catalog(rng, "", true);
    ExecOptions plain_opts;
    plain_opts.ipf_enabled = false;
    ExecOptions drop_opts;
    Executor ex_rw(reweighted, drop_opts), ex_mech(unit_mech, drop_opts), ex_plain(unit_plain, plain_opts);
    for (int i = 0; i < 20; ++i) {
      std::vector<std::string> group;
      std::string body = fuzz_query(rng, group);
      ++queries;
      const std::pair<Executor*, Catalog*> setups[] = {{&ex_rw, &reweighted}, {&ex_mech, &unit_mech},
                                                       {&ex_plain, &unit_plain}};
      for (const auto* pair = setups; pair != setups + 3; ++pair) {
        auto closed = pair->first->execute(support::select("SELECT " + body));
        auto semi = pair->first->execute(support::select("SELECT SEMI-OPEN " + body));
        answered += 2;
        auto sample_keys = oracle::group_counts(pair->second->find_sample("S")->data, group);
        for (const QueryAnswer* ans : std::initializer_list<const QueryAnswer*>{&closed, &semi})
          for (const auto& [k, v] : support::by_key(*ans))
            if (!sample_keys.count(k)) ++invented;
        if (pair->first != &ex_rw) {
          auto a = support::by_key(closed), b = support::by_key(semi);
          if (a.size() != b.size()) {
            ++mismatches;
            continue;
          }
          for (const auto& [k, vals] : a) {
            auto it = b.find(k);
            if (it == b.end() || it->second.size() != vals.size()) {
              ++mismatches;
              continue;
            }
            for (std::size_t j = 0; j < vals.size(); ++j) {
              bool both_nan = std::isnan(vals[j]) && std::isnan(it->second[j]);
              if (!both_nan && std::abs(vals[j] - it->second[j]) > 1e-9 * std::max(1.0, std::abs(vals[j]))) ++mismatches;
            }
          }
        }
      }
    }
  }
  bool ok = queries >= 1000 && invented == 0 && mismatches == 0;
  return {ok, std::to_string(queries) + " random queries (" + std::to_string(answered) + " answers): " +
                  std::to_string(invented) + " invented group keys, " + std::to_string(mismatches) +
                  " CLOSED/SEMI-OPEN mismatches under unit weights"};
}

// ---------------------------------------------------------------------------

Outcome spiral_reproduction() {
  const auto t0 = Clock::now();
  bench::SpiralExperimentSpec spec;
  spec.apply(KvConfig::read_file(std::string(OW_SOURCE_DIR) + "/configs/spiral.cfg"));
  auto res = bench::run_spiral_experiment(spec);
  std::string detail;
  bool ok = true;
  for (std::size_t i = 0; i < res.attributes.size(); ++i) {
    bool better = res.w1_generated[i] < res.w1_sample[i];
    ok = ok && better;
    detail += "W1(" + res.attributes[i] + ") generated " + fmt(res.w1_generated[i]) + " vs sample " +
              fmt(res.w1_sample[i]) + "; ";
  }
  for (double cov : {0.4, 0.6, 0.8}) {
    double unif = NAN, gen = NAN;
    for (const auto& r : res.table.rows)
      if (r.key == format_number(cov)) (r.method == "unif" ? unif : gen) = r.summary.mean;
    ok = ok && gen < unif;
    detail += "cov " + format_number(cov) + " mswg " + fmt(gen) + "% vs unif " + fmt(unif) + "%; ";
  }
  double secs = seconds_since(t0);
  ok = ok && secs <= 20 * 60;
  return {ok, detail + fmt(secs, "%.0f") + " s"};
}

// ---------------------------------------------------------------------------

Outcome flights_ordering() {
  const auto t0 = Clock::now();
  bench::FlightsExperimentSpec spec;
  spec.apply(KvConfig::read_file(std::string(OW_SOURCE_DIR) + "/configs/flights.cfg"));
  spec.run_mswg = false;
  auto res = bench::run_flightslike_experiment(spec);
  auto err = [&](int id, const char* m) {
    const auto* r = res.find(id, m);
    return r ? r->error : NAN;
  };
  double u1 = err(1, "unif"), i1 = err(1, "ipf");
  double u_avg = 0, i_avg = 0;
  for (int id = 1; id <= 4; ++id) {
    u_avg += err(id, "unif") / 4;
    i_avg += err(id, "ipf") / 4;
  }
  bool ok = u1 < 5.0 && i1 < 5.0 && i_avg <= u_avg;
  return {ok, "query 1: unif " + fmt(u1) + "%, ipf " + fmt(i1) + "%; queries 1-4 mean: ipf " + fmt(i_avg) +
                  "% vs unif " + fmt(u_avg) + "%; " + fmt(seconds_since(t0), "%.0f") + " s"};
}

// ---------------------------------------------------------------------------

Outcome migrants_end_to_end() {
  const auto t0 = Clock::now();
  CliConfig cfg;
  cfg.quiet = true;
  std::ostringstream out, log;
  Session s(cfg, out, log);
  const std::string dir = std::string(OW_DATA_DIR) + "/migrants";
  s.run_text(slurp(dir + "/script.sql"), dir);
  const QueryAnswer* semi = nullptr;
  const QueryAnswer* open = nullptr;
  for (const auto& a : s.answers()) {
    if (a.provenance == Provenance::Open) open = &a;
    else if (a.provenance != Provenance::Closed) semi = &a;
  }
  if (!semi || !open) return {false, "script did not produce both a SEMI-OPEN and an OPEN answer"};
  const Table& sample = s.catalog().find_sample("YahooMigrants")->data;
  auto keys = oracle::group_counts(sample, {"country", "email"});
  std::size_t semi_new = 0, open_new = 0;
  std::set<std::string> new_emails;
  for (const auto& [k, v] : support::by_key(*semi)) semi_new += keys.count(k) == 0;
  for (const auto& [k, v] : support::by_key(*open))
    if (!keys.count(k)) {
      ++open_new;
      new_emails.insert(k[1]);
    }
  std::string emails;
  for (const auto& e : new_emails) emails += (emails.empty() ? "" : " ") + e;
  bool ok = semi_new == 0 && open_new > 0;
  return {ok, "SEMI-OPEN " + std::to_string(semi->rows.size()) + " groups (" + std::to_string(semi_new) +
                  " not in sample), OPEN " + std::to_string(open->rows.size()) + " groups (" +
                  std::to_string(open_new) + " not in sample: " + emails + "); " + fmt(seconds_since(t0), "%.0f") +
                  " s"};
}

// ---------------------------------------------------------------------------

Outcome determinism() {
  kernels::set_mode(kernels::Mode::Serial);
  KvConfig kv = KvConfig::parse(
      "spiral.population = 20000\nspiral.sample_size = 2000\nexperiment.queries = 30\nexperiment.repeats = 3\n"
      "mswg.epochs = 2\nmswg.steps_per_epoch = 20\nmswg.hidden_layers = 32,32\n"
      "flights.population = 40000\nmswg.projections = 20\nexperiment.open_samples = 2\n");
  auto base = fs::temp_directory_path() / "ow_acceptance_determinism";
  fs::remove_all(base);
  std::vector<std::string> spiral_csv, flights_csv;
  for (int run = 0; run < 2; ++run) {
    auto dir = (base / ("run" + std::to_string(run))).string();
    bench::SpiralExperimentSpec sp;
    sp.reseed(77);
    sp.apply(kv);
    spiral_csv.push_back(slurp(bench::write_spiral_outputs(bench::run_spiral_experiment(sp), dir)));
    bench::FlightsExperimentSpec fl;
    fl.reseed(77);
    fl.apply(kv);
    fl.train.epochs = 1;
    flights_csv.push_back(slurp(bench::write_flights_outputs(bench::run_flightslike_experiment(fl), dir)));
  }
  kernels::set_mode(kernels::Mode::Parallel);
  bool ok = !spiral_csv[0].empty() && spiral_csv[0] == spiral_csv[1] && !flights_csv[0].empty() &&
            flights_csv[0] == flights_csv[1];
  return {ok, "spiral CSV " + std::to_string(spiral_csv[0].size()) + " bytes " +
                  (spiral_csv[0] == spiral_csv[1] ? "identical" : "DIFFERENT") + ", flights CSV " +
                  std::to_string(flights_csv[0].size()) + " bytes " +
                  (flights_csv[0] == flights_csv[1] ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"transport oracle", transport_oracle},
      {"gradient suite", gradient_suite},
      {"IPF exactness", ipf_exactness},
      {"mechanism weighting", mechanism_weighting},
      {"visibility contract", visibility_contract},
      {"spiral reproduction", spiral_reproduction},
      {"flights-like ordering", flights_ordering},
      {"end-to-end script", migrants_end_to_end},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
