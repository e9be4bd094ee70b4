#include "openworld/mswg/marginals.hpp"

#include <algorithm>
#include <set>

#include "openworld/error.hpp"

namespace ow::mswg {

std::vector<Marginal> augment_marginals(const std::vector<Marginal>& population, const Table& sample) {
  if (population.empty()) fail(ErrorCode::NoPopulationMarginals, "no population marginals: population size unknown");
  const double total = population.front().total();
  std::vector<Marginal> out;
  std::set<std::string> covered;
  for (const auto& m : population) {
    bool usable = std::all_of(m.attributes.begin(), m.attributes.end(),
                              [&](const std::string& a) { return sample.column_index(a).has_value(); });
    if (!usable) continue;
    out.push_back(m);
    covered.insert(m.attributes.begin(), m.attributes.end());
  }
  for (const auto& def : sample.schema()) {
    if (covered.count(def.name)) continue;
    std::string owner = population.front().owner;
    Marginal sm = marginal_from_table(sample, "sample_" + def.name, owner, {def.name});
    double s = sm.total();
    if (s > 0.0)
      for (auto& c : sm.cells) c.count *= total / s;
    out.push_back(std::move(sm));
  }
  return out;
}

PreparedMarginal prepare_marginal(const Marginal& marginal, const Encoding& encoding) {
  PreparedMarginal pm;
  pm.name = marginal.name;
  std::vector<std::size_t> attrs;
  for (const auto& a : marginal.attributes) {
    auto i = encoding.find(a);
    if (!i) fail(ErrorCode::UnknownAttribute, "marginal attribute '" + a + "' is not encoded");
    attrs.push_back(*i);
    const auto& ea = encoding.attributes()[*i];
    for (std::size_t k = 0; k < ea.width; ++k) pm.dims.push_back(ea.offset + k);
    const auto& bin = marginal.binning[attrs.size() - 1];
    for (std::size_t k = 0; k < ea.width; ++k)
      pm.bin_width.push_back(bin && ea.kind == AttributeKind::Numeric ? bin->width() / (ea.max - ea.min) : 0.0);
  }
  const std::size_t k = pm.dims.size();
  double total = marginal.total();
  if (!(total > 0.0)) fail(ErrorCode::EmptyDistribution, "marginal '" + marginal.name + "' has no mass");
  for (const auto& cell : marginal.cells) {
    if (cell.count <= 0.0) continue;
    std::vector<double> pt(k, 0.0);
    std::size_t pos = 0;
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      const auto& ea = encoding.attributes()[attrs[a]];
      if (ea.kind == AttributeKind::Numeric) {
        pt[pos] = encoding.encode_numeric(attrs[a], marginal.numeric_coordinate(a, cell.key[a]));
      } else {
        pt[pos + encoding.category_index(attrs[a], std::get<std::string>(cell.key[a]))] = 1.0;
      }
      pos += ea.width;
    }
    pm.points.insert(pm.points.end(), pt.begin(), pt.end());
    pm.mass.push_back(cell.count / total);
  }
  double acc = 0.0;
  for (double m : pm.mass) pm.cdf.push_back(acc += m);
  if (!pm.cdf.empty()) pm.cdf.back() = 1.0;
  return pm;
}

TransportTarget exact_target(const PreparedMarginal& m) { return {m.points, m.mass, m.cells()}; }

TransportTarget resample_target(const PreparedMarginal& m, std::size_t n, Rng& rng) {
  TransportTarget t;
  const std::size_t k = m.k();
  t.count = n;
  t.points.resize(n * k);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double x = u(rng);
    auto c = static_cast<std::size_t>(std::upper_bound(m.cdf.begin(), m.cdf.end(), x) - m.cdf.begin());
    c = std::min(c, m.cells() - 1);
    std::copy_n(m.points.data() + c * k, k, t.points.data() + i * k);
    for (std::size_t j = 0; j < k; ++j)
      if (m.bin_width[j] > 0.0) t.points[i * k + j] += (u(rng) - 0.5) * m.bin_width[j];
  }
  return t;
}

}  // namespace ow::mswg
