#include "openworld/bench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "openworld/error.hpp"

namespace ow::bench {

namespace {

using Rng = std::mt19937_64;

Table numeric_table(std::initializer_list<const char*> names) {
  Schema s;
  for (const char* n : names) {
    AttributeDef d;
    d.name = n;
    d.kind = AttributeKind::Numeric;
    s.push_back(std::move(d));
  }
  return Table(std::move(s));
}

Table take_rows(const Table& t, std::span<const std::size_t> rows) {
  std::vector<char> keep(t.rows(), 0);
  for (auto r : rows) keep[r] = 1;
  return t.filter_rows(keep);
}

}  // namespace

void SpiralSpec::validate() const {
  if (sample_size == 0 || sample_size >= population) fail(ErrorCode::ConfigError, "spiral needs N > sample size > 0");
  if (!(sigma >= 0.0)) fail(ErrorCode::ConfigError, "spiral sigma must be >= 0");
  if (arms < 1) fail(ErrorCode::ConfigError, "spiral needs at least one arm");
  if (!(theta_max > theta_min) || theta_min < 0.0) fail(ErrorCode::ConfigError, "spiral angle range is invalid");
  if (!std::isfinite(gamma)) fail(ErrorCode::ConfigError, "spiral gamma must be finite");
}

void SpiralSpec::apply(const KvConfig& cfg, const std::string& prefix) {
  population = cfg.get_u64(prefix + "population", population);
  arms = static_cast<int>(cfg.get_int(prefix + "arms", arms));
  theta_min = cfg.get_double(prefix + "theta_min", theta_min);
  theta_max = cfg.get_double(prefix + "theta_max", theta_max);
  b = cfg.get_double(prefix + "b", b);
  sigma = cfg.get_double(prefix + "sigma", sigma);
  gamma = cfg.get_double(prefix + "gamma", gamma);
  sample_size = cfg.get_u64(prefix + "sample_size", sample_size);
  seed = cfg.get_u64(prefix + "seed", seed);
  validate();
}

std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> weights, std::size_t k,
                                                             std::uint64_t seed) {
  if (k > weights.size()) fail(ErrorCode::ConfigError, "cannot sample more rows than exist");
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, std::size_t>> keys(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double x = u(rng);
    while (x <= 0.0) x = u(rng);
    double w = weights[i];
    keys[i] = {w > 0.0 ? std::log(x) / w : -std::numeric_limits<double>::infinity(), i};
  }
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = keys[i].second;
  std::sort(out.begin(), out.end());
  return out;
}

SpiralData gen_spiral(const SpiralSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> angle(spec.theta_min, spec.theta_max);
  std::uniform_int_distribution<int> arm(0, spec.arms - 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  SpiralData out;
  out.population = numeric_table({"x", "y"});
  out.population.reserve(spec.population);
  out.theta.resize(spec.population);
  std::vector<double> inclusion(spec.population);
  for (std::size_t i = 0; i < spec.population; ++i) {
    double th = angle(rng);
    double phase = 2.0 * kPi * arm(rng) / spec.arms;
    double r = spec.b * th;
    double row[2] = {r * std::cos(th + phase) + spec.sigma * noise(rng), r * std::sin(th + phase) + spec.sigma * noise(rng)};
    out.population.append_raw(row);
    out.theta[i] = th;
    inclusion[i] = std::pow(th, spec.gamma);
  }
  out.sample_rows = weighted_sample_without_replacement(inclusion, spec.sample_size, spec.seed ^ 0x9e3779b97f4a7c15ULL);
  out.sample = take_rows(out.population, out.sample_rows);
  return out;
}

void RangeQuerySpec::validate() const {
  if (!(coverage > 0.0 && coverage <= 1.0)) fail(ErrorCode::ConfigError, "range query coverage must be in (0,1]");
}

sql::Predicate BoxQuery::predicate() const {
  sql::Predicate p;
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    p.atoms.push_back(sql::Comparison{attributes[i], sql::CompareOp::Ge, Value{lo[i]}});
    p.atoms.push_back(sql::Comparison{attributes[i], sql::CompareOp::Le, Value{hi[i]}});
  }
  return p;
}

bool BoxQuery::contains(const Table& t, std::span<const std::size_t> cols, std::size_t row) const {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    double v = t.raw(row, cols[i]);
    if (!(v >= lo[i] && v <= hi[i])) return false;
  }
  return true;
}

std::vector<BoxQuery> gen_range_queries(const Table& population, const RangeQuerySpec& spec) {
  spec.validate();
  std::vector<std::size_t> cols;
  std::vector<double> mins, maxs;
  for (std::size_t c = 0; c < population.cols(); ++c) {
    if (!population.schema()[c].is_numeric()) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : population.column(c)) {
      if (is_missing(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    cols.push_back(c);
    mins.push_back(lo);
    maxs.push_back(hi);
  }
  if (cols.empty() || population.rows() == 0) fail(ErrorCode::ConfigError, "range queries need a numeric population");
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<BoxQuery> out;
  for (std::size_t q = 0; q < spec.count; ++q) {
    BoxQuery b;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      double range = maxs[i] - mins[i];
      double side = spec.coverage * range;
      double start = mins[i] + u(rng) * (range - side);
      if (spec.coverage >= 1.0) start = mins[i];
      b.attributes.push_back(population.schema()[cols[i]].name);
      b.lo.push_back(start);
      b.hi.push_back(spec.coverage >= 1.0 ? maxs[i] : start + side);
    }
    out.push_back(std::move(b));
  }
  return out;
}

double box_count(const Table& t, const BoxQuery& q, std::span<const double> weights) {
  std::vector<std::size_t> cols;
  for (const auto& a : q.attributes) {
    auto c = t.column_index(a);
    if (!c) fail(ErrorCode::UnknownAttribute, "table lacks box attribute '" + a + "'");
    cols.push_back(*c);
  }
  double s = 0.0;
  for (std::size_t r = 0; r < t.rows(); ++r)
    if (q.contains(t, cols, r)) s += weights.empty() ? 1.0 : weights[r];
  return s;
}

void FlightsLikeSpec::validate() const {
  if (population < 100) fail(ErrorCode::ConfigError, "flights population too small");
  if (!(bias_rate >= 0.0 && bias_rate <= 1.0)) fail(ErrorCode::ConfigError, "bias rate must be in [0,1]");
  if (!(sample_fraction > 0.0 && sample_fraction < 1.0)) fail(ErrorCode::ConfigError, "sample fraction must be in (0,1)");
}

void FlightsLikeSpec::apply(const KvConfig& cfg, const std::string& prefix) {
  population = cfg.get_u64(prefix + "population", population);
  bias_threshold = cfg.get_double(prefix + "bias_threshold", bias_threshold);
  bias_rate = cfg.get_double(prefix + "bias_rate", bias_rate);
  sample_fraction = cfg.get_double(prefix + "sample_fraction", sample_fraction);
  seed = cfg.get_u64(prefix + "seed", seed);
  validate();
}

const std::vector<std::string>& flight_carriers() {
  static const std::vector<std::string> c = {"WN", "AA", "DL", "UA", "OO", "EV", "B6",
                                             "AS", "NK", "US", "F9", "HA", "VX", "MQ"};
  return c;
}

FlightsData gen_flightslike(const FlightsLikeSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto& carriers = flight_carriers();
  // Popularity: Zipf-like over list order, with US and F9 pushed into the tail.
  std::vector<double> popularity;
  for (std::size_t k = 0; k < carriers.size(); ++k) {
    double w = 1.0 / std::pow(static_cast<double>(k + 1), 1.1);
    if (carriers[k] == "US" || carriers[k] == "F9") w *= 0.25;
    popularity.push_back(w);
  }
  // Per-carrier preference for long routes and schedule padding (minutes).
  const std::vector<double> reach = {-0.6, 0.4, 0.3, 0.5, -1.6, -1.4, 0.4, 0.5, 0.1, 0.0, 0.1, 1.0, 0.8, -1.5};
  const std::vector<double> pad = {-4, 3, 2, 4, -2, 0, 1, 2, -1, 3, 0, 6, 2, -3};

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> routes(400);
  for (auto& r : routes) r = std::round(std::clamp(std::exp(6.6 + 0.7 * normal(rng)), 70.0, 2800.0));
  std::discrete_distribution<std::size_t> pick_carrier(popularity.begin(), popularity.end());
  std::bernoulli_distribution delay(0.05);
  std::exponential_distribution<double> delay_minutes(1.0 / 30.0);
  std::vector<std::discrete_distribution<std::size_t>> pick_route;
  for (std::size_t k = 0; k < carriers.size(); ++k) {
    std::vector<double> w;
    for (double r : routes) w.push_back(std::exp(reach[k] * (r / 1000.0 - 1.0)));
    pick_route.emplace_back(w.begin(), w.end());
  }

  AttributeDef c;
  c.name = "C";
  c.kind = AttributeKind::Categorical;
  c.domain = carriers;
  Schema schema{c};
  for (const char* n : {"O", "I", "E", "D"}) {
    AttributeDef d;
    d.name = n;
    d.kind = AttributeKind::Numeric;
    schema.push_back(d);
  }
  FlightsData out;
  out.population = Table(schema);
  out.population.reserve(spec.population);
  std::vector<double> elapsed(spec.population);
  for (std::size_t i = 0; i < spec.population; ++i) {
    std::size_t k = pick_carrier(rng);
    double dist = routes[pick_route[k](rng)];
    double o = std::exp(2.7 + 0.4 * normal(rng));
    if (delay(rng)) o += delay_minutes(rng);
    o = std::max(1.0, std::round(o));
    double in = std::max(1.0, std::round(std::exp(1.9 + 0.35 * normal(rng))));
    double air = std::max(10.0, dist / 8.0 + 12.0 + pad[k] + 6.0 * normal(rng));
    double e = std::round(o + in + air);
    double row[5] = {static_cast<double>(k), o, in, e, dist};
    out.population.append_raw(row);
    elapsed[i] = e;
  }

  std::vector<std::size_t> longs, shorts;
  for (std::size_t i = 0; i < spec.population; ++i) (elapsed[i] > spec.bias_threshold ? longs : shorts).push_back(i);
  const auto n = static_cast<std::size_t>(std::floor(spec.sample_fraction * static_cast<double>(spec.population)));
  const auto n_long = static_cast<std::size_t>(std::llround(spec.bias_rate * static_cast<double>(n)));
  const std::size_t n_short = n - n_long;
  if (n_long > longs.size() || n_short > shorts.size())
    fail(ErrorCode::ConfigError, "flights population cannot supply the requested biased sample");
  std::vector<std::size_t> rows;
  for (auto* group : {&longs, &shorts}) {
    std::vector<double> w(group->size(), 1.0);
    auto picks = weighted_sample_without_replacement(w, group == &longs ? n_long : n_short, rng());
    for (auto p : picks) rows.push_back((*group)[p]);
  }
  std::sort(rows.begin(), rows.end());
  out.sample = take_rows(out.population, rows);
  for (const char* a : {"C", "O", "I", "D"})
    out.marginals.push_back(marginal_from_table(out.population, std::string("flights_") + a + "E", "flights", {a, "E"}));
  return out;
}

}  // namespace ow::bench
