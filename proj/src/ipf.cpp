#include "openworld/ipf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "openworld/error.hpp"

namespace ow {

namespace {

constexpr double kEps = 1e-12;

struct KeyLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
  }
};

// Row -> index of the marginal cell it falls in, or -1 when unlisted.
std::vector<int> assign_cells(const Table& table, const Marginal& m) {
  std::map<std::vector<Value>, int, KeyLess> index;
  for (std::size_t c = 0; c < m.cells.size(); ++c) index.emplace(m.cells[c].key, static_cast<int>(c));
  std::vector<std::size_t> cols;
  for (const auto& a : m.attributes) {
    auto c = table.column_index(a);
    if (!c) fail(ErrorCode::UnknownAttribute, "sample lacks marginal attribute '" + a + "'");
    if (table.schema()[*c].kind != m.kinds[cols.size()])
      fail(ErrorCode::TypeMismatch, "attribute '" + a + "' kind differs between sample and marginal");
    cols.push_back(*c);
  }
  std::vector<int> out(table.rows(), -1);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool missing = false;
    for (auto c : cols) missing = missing || is_missing(table.raw(r, c));
    if (missing) continue;
    auto it = index.find(cell_of(table, r, m, cols));
    if (it != index.end()) out[r] = it->second;
  }
  return out;
}

double max_relative(std::span<const double> sums, std::span<const double> targets, double outside) {
  double worst = outside > 0.0 ? outside / kEps : 0.0;
  for (std::size_t c = 0; c < sums.size(); ++c)
    worst = std::max(worst, std::abs(sums[c] - targets[c]) / std::max(targets[c], kEps));
  return worst;
}

void weighted_sums(std::span<const int> cells, std::span<const double> w, std::vector<double>& sums, double& outside) {
  std::fill(sums.begin(), sums.end(), 0.0);
  outside = 0.0;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    if (cells[r] >= 0) sums[static_cast<std::size_t>(cells[r])] += w[r];
    else outside += w[r];
  }
}

}  // namespace

void IpfConfig::apply(const KvConfig& cfg, const std::string& prefix) {
  max_rounds = static_cast<int>(cfg.get_int(prefix + "max_rounds", max_rounds));
  tolerance = cfg.get_double(prefix + "tolerance", tolerance);
  if (auto z = cfg.get(prefix + "zero_policy")) {
    if (*z == "error") zero_policy = ZeroPolicy::Error;
    else if (*z == "drop_and_renormalize") zero_policy = ZeroPolicy::DropAndRenormalize;
    else fail(ErrorCode::ConfigError, prefix + "zero_policy must be error or drop_and_renormalize");
  }
  validate();
}

void IpfConfig::validate() const {
  if (max_rounds < 1) fail(ErrorCode::ConfigError, "ipf max_rounds must be >= 1");
  if (!(tolerance > 0.0)) fail(ErrorCode::ConfigError, "ipf tolerance must be > 0");
}

double IpfReport::max_discrepancy() const {
  double m = 0.0;
  for (double d : discrepancy) m = std::max(m, d);
  return m;
}

double discrepancy(const Table& sample, std::span<const double> weights, const Marginal& marginal) {
  if (weights.size() != sample.rows()) fail(ErrorCode::Internal, "weights/rows mismatch");
  auto cells = assign_cells(sample, marginal);
  std::vector<double> sums(marginal.cells.size()), targets(marginal.cells.size());
  for (std::size_t c = 0; c < targets.size(); ++c) targets[c] = marginal.cells[c].count;
  double outside = 0.0;
  weighted_sums(cells, weights, sums, outside);
  return max_relative(sums, targets, outside);
}

IpfResult ipf_fit(const Table& sample, std::span<const double> initial_weights, const std::vector<Marginal>& marginals,
                  const IpfConfig& cfg) {
  cfg.validate();
  if (sample.rows() == 0) fail(ErrorCode::EmptySample, "cannot fit an empty sample");
  if (initial_weights.size() != sample.rows()) fail(ErrorCode::Internal, "weights/rows mismatch");
  double mass = 0.0;
  for (double w : initial_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::NegativeCount, "initial weights must be finite and nonnegative");
    mass += w;
  }
  if (!(mass > 0.0)) fail(ErrorCode::EmptySample, "initial weights are all zero");

  IpfResult res;
  res.weights.assign(initial_weights.begin(), initial_weights.end());
  IpfReport& rep = res.report;
  const std::size_t nm = marginals.size();
  std::vector<std::vector<int>> cells(nm);
  std::vector<std::vector<double>> targets(nm);
  rep.dropped_mass.assign(nm, 0.0);

  for (std::size_t m = 0; m < nm; ++m) {
    const Marginal& mg = marginals[m];
    cells[m] = assign_cells(sample, mg);
    std::vector<std::size_t> support(mg.cells.size(), 0);
    for (int c : cells[m])
      if (c >= 0) ++support[static_cast<std::size_t>(c)];
    targets[m].resize(mg.cells.size());
    double total = 0.0, dropped = 0.0;
    for (std::size_t c = 0; c < mg.cells.size(); ++c) {
      double t = mg.cells[c].count;
      total += t;
      if (t > 0.0 && support[c] == 0) {
        rep.structural_zeros.push_back({m, mg.cells[c].key, t});
        dropped += t;
        t = 0.0;
      }
      targets[m][c] = t;
    }
    if (dropped > 0.0) {
      if (cfg.zero_policy == ZeroPolicy::Error) {
        const auto& z = rep.structural_zeros.front();
        std::string key;
        for (std::size_t i = 0; i < z.key.size(); ++i) key += (i ? ", " : "") + format_value(z.key[i]);
        fail(ErrorCode::StructuralZero, "marginal '" + mg.name + "' cell (" + key + ") has target " +
                                            format_number(z.target) + " but no sample tuples (" +
                                            std::to_string(rep.structural_zeros.size()) + " such cells)");
      }
      double reachable = total - dropped;
      if (!(reachable > 0.0))
        fail(ErrorCode::StructuralZero, "marginal '" + mg.name + "' has no cell supported by the sample");
      double scale = total / reachable;
      for (double& t : targets[m]) t *= scale;
    }
    rep.dropped_mass[m] = dropped;
  }

  rep.discrepancy.assign(nm, 0.0);
  std::vector<double> sums;
  double outside = 0.0;
  auto measure = [&]() {
    for (std::size_t m = 0; m < nm; ++m) {
      sums.resize(targets[m].size());
      weighted_sums(cells[m], res.weights, sums, outside);
      rep.discrepancy[m] = max_relative(sums, targets[m], outside);
    }
  };
  if (nm == 0) {
    rep.converged = true;
    return res;
  }
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    for (std::size_t m = 0; m < nm; ++m) {
      sums.resize(targets[m].size());
      weighted_sums(cells[m], res.weights, sums, outside);
      for (std::size_t r = 0; r < res.weights.size(); ++r) {
        int c = cells[m][r];
        if (c < 0) {
          res.weights[r] = 0.0;
          continue;
        }
        double s = sums[static_cast<std::size_t>(c)];
        if (s > 0.0) res.weights[r] *= targets[m][static_cast<std::size_t>(c)] / s;
      }
    }
    rep.rounds = round;
    measure();
    if (rep.max_discrepancy() <= cfg.tolerance) {
      rep.converged = true;
      break;
    }
  }
  return res;
}

IpfResult ipf_fit(const SampleRelation& sample, const std::vector<Marginal>& marginals, const IpfConfig& cfg) {
  return ipf_fit(sample.data, sample.weights, marginals, cfg);
}

}  // namespace ow
