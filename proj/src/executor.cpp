#include "openworld/executor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "openworld/error.hpp"
#include "openworld/mswg/marginals.hpp"
#include "openworld/predicate.hpp"

namespace ow {

namespace {

struct KeyLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
  }
};

sql::Predicate conjunction(const sql::Predicate& a, const sql::Predicate& b) {
  sql::Predicate p = a;
  p.atoms.insert(p.atoms.end(), b.atoms.begin(), b.atoms.end());
  return p;
}

bool covers(const Table& t, const std::vector<std::string>& attrs) {
  return std::all_of(attrs.begin(), attrs.end(), [&](const std::string& a) { return t.column_index(a).has_value(); });
}

std::vector<Marginal> usable(const std::vector<const Marginal*>& ms, const Table& sample) {
  std::vector<Marginal> out;
  for (const Marginal* m : ms)
    if (covers(sample, m->attributes)) out.push_back(*m);
  return out;
}

sql::SelectQuery with_where(const sql::SelectQuery& q, sql::Predicate where) {
  sql::SelectQuery out = q;
  out.where = std::move(where);
  return out;
}

void hash_table(std::ostringstream& os, const Table& t) {
  for (const auto& a : t.schema()) {
    os << a.name << ':' << to_string(a.kind);
    for (const auto& d : a.domain) os << ',' << d;
    os << ';';
  }
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.cols(); ++c) os << format_number(t.raw(r, c)) << ' ';
    os << '\n';
  }
}

double population_total(const std::vector<Marginal>& ms) { return ms.empty() ? 0.0 : ms.front().total(); }

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Closed: return "closed";
    case Provenance::SemiOpenMechanism: return "semi_open_mechanism";
    case Provenance::SemiOpenIpfDirect: return "semi_open_ipf_direct";
    case Provenance::SemiOpenIpfGlobal: return "semi_open_ipf_global";
    case Provenance::Open: return "open";
  }
  return "unknown";
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::vector<Value>> QueryAnswer::keys() const {
  std::vector<std::vector<Value>> out;
  for (const auto& row : rows) {
    std::vector<Value> k;
    for (auto c : key_columns) k.push_back(row[c]);
    out.push_back(std::move(k));
  }
  return out;
}

Plan plan(const sql::SelectQuery& query, const Catalog& catalog) {
  Plan p;
  p.population = catalog.find_population(query.source);
  if (!p.population) fail(ErrorCode::UnknownPopulation, "unknown population '" + query.source + "'");
  const PopulationDef* cur = p.population;
  for (int depth = 0; !cur->is_global; ++depth) {
    if (depth > 64) fail(ErrorCode::Internal, "population view chain is cyclic");
    p.view = conjunction(p.view, cur->predicate);
    const PopulationDef* next = catalog.find_population(cur->source);
    if (!next) fail(ErrorCode::UnknownPopulation, "population '" + cur->name + "' has unknown source '" + cur->source + "'");
    cur = next;
  }
  std::vector<std::string> needed = query.referenced_attributes();
  for (const auto& a : p.view.attributes())
    if (std::find(needed.begin(), needed.end(), a) == needed.end()) needed.push_back(a);

  for (const auto& s : catalog.state().samples)
    if (covers(s.data, needed) && s.data.cols() > 0 && (!p.sample || s.rows() > p.sample->rows())) p.sample = &s;
  if (!p.sample) {
    std::string list;
    for (const auto& a : needed) list += (list.empty() ? "" : ", ") + a;
    fail(ErrorCode::NoUsableSample, "no sample covers the attributes {" + list + "} of '" + query.source + "'");
  }

  bool any = !catalog.state().marginals.empty();
  p.marginals = usable(catalog.marginals_of(p.population->name), p.sample->data);
  if (!p.marginals.empty()) {
    p.path = MetadataPath::QueryPopulation;
  } else if (!p.population->is_global) {
    p.marginals = usable(catalog.marginals_of(catalog.global_population().name), p.sample->data);
    if (!p.marginals.empty()) p.path = MetadataPath::Global;
  }
  p.population_size = population_total(p.marginals);

  bool needs_metadata = query.visibility == sql::Visibility::Open ||
                        (query.visibility == sql::Visibility::SemiOpen && !p.sample->mechanism);
  if (needs_metadata && !any) fail(ErrorCode::NoMetadata, "no population metadata is registered");
  return p;
}

QueryAnswer aggregate(const sql::SelectQuery& query, const WeightedRows& rows, bool keep_zero_groups,
                      bool weight_column) {
  const Table& t = *rows.table;
  if (rows.weights.size() != t.rows()) fail(ErrorCode::Internal, "weights/rows mismatch");
  const std::vector<char> mask = evaluate_predicate(query.where, t);
  QueryAnswer ans;

  if (!query.has_aggregates()) {
    std::vector<std::size_t> cols;
    if (query.star) {
      for (std::size_t c = 0; c < t.cols(); ++c) cols.push_back(c);
    } else {
      for (const auto& item : query.items) {
        const auto& name = std::get<sql::AttributeRef>(item).name;
        auto c = t.column_index(name);
        if (!c) fail(ErrorCode::UnknownAttribute, "unknown attribute '" + name + "'");
        cols.push_back(*c);
      }
    }
    for (auto c : cols) ans.columns.push_back(t.schema()[c].name);
    if (weight_column) ans.columns.push_back("weight");
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (!mask[r]) continue;
      if (!keep_zero_groups && !(rows.weights[r] > 0.0)) continue;
      std::vector<Value> row;
      for (auto c : cols) row.push_back(t.value(r, c));
      if (weight_column) row.emplace_back(rows.weights[r]);
      ans.rows.push_back(std::move(row));
    }
    return ans;
  }

  ans.aggregate = true;
  std::vector<std::size_t> gcols;
  for (const auto& g : query.group_by) {
    auto c = t.column_index(g);
    if (!c) fail(ErrorCode::UnknownAttribute, "unknown group-by attribute '" + g + "'");
    gcols.push_back(*c);
  }
  struct Item {
    bool is_key = false;
    std::size_t key_index = 0;
    sql::AggregateFn fn = sql::AggregateFn::CountStar;
    std::size_t column = 0;
  };
  std::vector<Item> items;
  for (const auto& it : query.items) {
    Item x;
    if (const auto* a = std::get_if<sql::AttributeRef>(&it)) {
      x.is_key = true;
      auto pos = std::find(query.group_by.begin(), query.group_by.end(), a->name);
      if (pos == query.group_by.end())
        fail(ErrorCode::SyntaxError, "attribute '" + a->name + "' must appear in GROUP BY");
      x.key_index = static_cast<std::size_t>(pos - query.group_by.begin());
      ans.key_columns.push_back(items.size());
      ans.columns.push_back(a->name);
    } else {
      const auto& agg = std::get<sql::Aggregate>(it);
      x.fn = agg.fn;
      if (agg.fn != sql::AggregateFn::CountStar) {
        auto c = t.column_index(agg.argument);
        if (!c) fail(ErrorCode::UnknownAttribute, "unknown attribute '" + agg.argument + "'");
        if (!t.schema()[*c].is_numeric())
          fail(ErrorCode::TypeMismatch, "cannot aggregate categorical attribute '" + agg.argument + "'");
        x.column = *c;
      }
      ans.columns.push_back(sql::aggregate_label(agg));
    }
    items.push_back(x);
  }

  struct Acc {
    double weight = 0.0;
    std::vector<double> sum, wsum;
  };
  std::map<std::vector<Value>, Acc, KeyLess> groups;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (!mask[r]) continue;
    std::vector<Value> key;
    bool missing = false;
    for (auto c : gcols) {
      missing = missing || is_missing(t.raw(r, c));
      key.push_back(t.value(r, c));
    }
    if (missing) continue;
    Acc& acc = groups[key];
    if (acc.sum.empty()) acc.sum.assign(items.size(), 0.0), acc.wsum.assign(items.size(), 0.0);
    const double w = rows.weights[r];
    acc.weight += w;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].is_key || items[i].fn == sql::AggregateFn::CountStar) continue;
      double v = t.raw(r, items[i].column);
      if (is_missing(v)) continue;
      acc.sum[i] += w * v;
      acc.wsum[i] += w;
    }
  }
  // A global aggregate always has exactly one row.
  if (gcols.empty() && groups.empty()) groups[{}] = Acc{0.0, std::vector<double>(items.size(), 0.0),
                                                      std::vector<double>(items.size(), 0.0)};
  for (const auto& [key, acc] : groups) {
    if (!keep_zero_groups && !gcols.empty() && !(acc.weight > 0.0)) continue;
    std::vector<Value> row;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const Item& x = items[i];
      if (x.is_key) row.push_back(key[x.key_index]);
      else if (x.fn == sql::AggregateFn::CountStar) row.emplace_back(acc.weight);
      else if (x.fn == sql::AggregateFn::Sum) row.emplace_back(acc.sum[i]);
      else row.emplace_back(acc.wsum[i] > 0.0 ? acc.sum[i] / acc.wsum[i] : kMissing);
    }
    ans.rows.push_back(std::move(row));
  }
  return ans;
}

std::vector<double> mechanism_weights(const SampleRelation& sample, const Catalog& catalog) {
  if (!sample.mechanism) fail(ErrorCode::Internal, "sample '" + sample.name + "' has no mechanism");
  const auto& mech = *sample.mechanism;
  const double p = mech.percent;
  if (mech.kind == sql::MechanismKind::Uniform) return std::vector<double>(sample.rows(), 100.0 / p);

  const Marginal* strata = nullptr;
  for (const Marginal* m : catalog.marginals_of(catalog.global_population().name))
    if (m->dimension() == 1 && m->attributes[0] == mech.strat_attribute) {
      strata = m;
      break;
    }
  if (!strata)
    fail(ErrorCode::NoMetadata, "stratified weighting of '" + sample.name + "' needs a 1-D marginal on '" +
                                    mech.strat_attribute + "'");
  auto col = sample.data.column_index(mech.strat_attribute);
  if (!col) fail(ErrorCode::UnknownAttribute, "sample lacks strata attribute '" + mech.strat_attribute + "'");
  std::map<std::vector<Value>, double, KeyLess> size;
  double total = 0.0;
  std::size_t k = 0;
  for (const auto& c : strata->cells) {
    size[c.key] = c.count;
    total += c.count;
    if (c.count > 0.0) ++k;
  }
  const std::size_t cols[1] = {*col};
  std::vector<double> w(sample.rows());
  for (std::size_t r = 0; r < sample.rows(); ++r) {
    auto it = size.find(cell_of(sample.data, r, *strata, cols));
    if (it == size.end() || !(it->second > 0.0))
      fail(ErrorCode::NoMetadata, "stratum '" + format_value(sample.data.value(r, *col)) + "' has no population count");
    double pr = (p / 100.0) * total / static_cast<double>(k) / it->second;
    w[r] = 1.0 / pr;
  }
  return w;
}

Executor::Executor(const Catalog& catalog, ExecOptions options) : catalog_(&catalog), options_(std::move(options)) {}

QueryAnswer Executor::execute(const sql::SelectQuery& query) {
  Plan p = plan(query, *catalog_);
  switch (query.visibility) {
    case sql::Visibility::Closed: return execute_closed(query, p);
    case sql::Visibility::SemiOpen: return execute_semi_open(query, p);
    case sql::Visibility::Open: return execute_open(query, p);
  }
  fail(ErrorCode::Internal, "unknown visibility");
}

QueryAnswer Executor::execute_closed(const sql::SelectQuery& query, const Plan& plan) const {
  WeightedRows rows{&plan.sample->data, std::vector<double>(plan.sample->rows(), 1.0)};
  QueryAnswer ans = aggregate(with_where(query, conjunction(plan.view, query.where)), rows, true, false);
  ans.provenance = Provenance::Closed;
  ans.sample = plan.sample->name;
  return ans;
}

QueryAnswer Executor::execute_semi_open(const sql::SelectQuery& query, const Plan& plan) const {
  const SampleRelation& s = *plan.sample;
  if (s.mechanism) {
    WeightedRows rows{&s.data, mechanism_weights(s, *catalog_)};
    QueryAnswer ans = aggregate(with_where(query, conjunction(plan.view, query.where)), rows, false, true);
    ans.provenance = Provenance::SemiOpenMechanism;
    ans.sample = s.name;
    return ans;
  }
  if (!options_.ipf_enabled) {
    WeightedRows rows{&s.data, s.weights};
    QueryAnswer ans = aggregate(with_where(query, conjunction(plan.view, query.where)), rows, false, true);
    ans.provenance = Provenance::SemiOpenIpfDirect;
    ans.sample = s.name;
    return ans;
  }
  if (plan.marginals.empty())
    fail(ErrorCode::UnknownMechanismNoMetadata,
         "sample '" + s.name + "' has no known mechanism and no marginals over its attributes");

  QueryAnswer ans;
  if (plan.path == MetadataPath::QueryPopulation) {
    // Marginals describe the query population: restrict first, then fit.
    std::vector<char> keep = evaluate_predicate(plan.view, s.data);
    Table view = s.data.filter_rows(keep);
    std::vector<double> w0;
    for (std::size_t r = 0; r < s.rows(); ++r)
      if (keep[r]) w0.push_back(s.weights[r]);
    IpfResult fit = ipf_fit(view, w0, plan.marginals, options_.ipf);
    ans = aggregate(query, {&view, fit.weights}, false, true);
    ans.ipf = fit.report;
    ans.provenance = Provenance::SemiOpenIpfDirect;
  } else {
    IpfResult fit = ipf_fit(s.data, s.weights, plan.marginals, options_.ipf);
    ans = aggregate(with_where(query, conjunction(plan.view, query.where)), {&s.data, fit.weights}, false, true);
    ans.ipf = fit.report;
    ans.provenance = Provenance::SemiOpenIpfGlobal;
  }
  ans.sample = s.name;
  return ans;
}

namespace {

Table training_sample(const Plan& plan) {
  if (plan.path == MetadataPath::QueryPopulation && !plan.view.empty())
    return plan.sample->data.filter_rows(evaluate_predicate(plan.view, plan.sample->data));
  return plan.sample->data;
}

}  // namespace

std::shared_ptr<const mswg::Generator> Executor::generator_for(const Plan& plan, bool force_retrain,
                                                               bool* was_cached) {
  if (plan.marginals.empty())
    fail(ErrorCode::NoMetadata, "open answering of '" + plan.sample->name + "' needs marginals over its attributes");
  Table sample = training_sample(plan);
  std::vector<Marginal> marginals = mswg::augment_marginals(plan.marginals, sample);
  std::ostringstream os;
  os << plan.sample->name << '\n' << options_.train.fingerprint() << '\n';
  hash_table(os, sample);
  for (const auto& m : marginals) {
    os << m.name << '|' << m.owner;
    for (const auto& a : m.attributes) os << '|' << a;
    for (const auto& c : m.cells) {
      for (const auto& k : c.key) os << ' ' << format_value(k);
      os << '=' << format_number(c.count);
    }
    os << '\n';
  }
  const std::uint64_t key = fnv1a(os.str());
  if (!force_retrain) {
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      if (was_cached) *was_cached = true;
      return it->second;
    }
  }
  if (was_cached) *was_cached = false;
  auto gen = std::make_shared<const mswg::Generator>(mswg::train(sample, marginals, options_.train, options_.progress));
  cache_[key] = gen;
  return gen;
}

std::shared_ptr<const mswg::Generator> Executor::retrain(const std::string& sample) {
  const SampleRelation* s = catalog_->find_sample(sample);
  if (!s) fail(ErrorCode::UnknownRelation, "unknown sample '" + sample + "'");
  Plan p;
  p.population = &catalog_->global_population();
  p.sample = s;
  p.path = MetadataPath::QueryPopulation;
  p.marginals = usable(catalog_->marginals_of(p.population->name), s->data);
  p.population_size = population_total(p.marginals);
  return generator_for(p, true);
}

QueryAnswer Executor::execute_open(const sql::SelectQuery& query, const Plan& plan) {
  bool cached = false;
  auto gen = generator_for(plan, false, &cached);
  const std::size_t n = training_sample(plan).rows();
  const std::size_t k = std::max<std::size_t>(options_.open_samples, 1);
  const double weight = gen->population_size / static_cast<double>(std::max<std::size_t>(n, 1));
  const sql::Predicate where =
      plan.path == MetadataPath::Global ? conjunction(plan.view, query.where) : query.where;
  const sql::SelectQuery q = with_where(query, where);

  std::vector<QueryAnswer> answers;
  for (std::size_t i = 0; i < k; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(options_.seed), static_cast<std::uint32_t>(options_.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    mswg::Rng rng(seq);
    Table t = mswg::generate(*gen, n, rng);
    answers.push_back(aggregate(q, {&t, std::vector<double>(t.rows(), weight)}, false, true));
    if (!query.has_aggregates()) break;
  }

  QueryAnswer ans;
  if (!query.has_aggregates()) {
    ans = std::move(answers.front());
    ans.materialized = true;
  } else {
    ans.columns = answers.front().columns;
    ans.key_columns = answers.front().key_columns;
    ans.aggregate = true;
    std::map<std::vector<Value>, std::pair<std::size_t, std::vector<Value>>, KeyLess> merged;
    for (const auto& a : answers) {
      auto keys = a.keys();
      for (std::size_t r = 0; r < a.rows.size(); ++r) {
        auto& slot = merged[keys[r]];
        if (slot.first == 0) {
          slot.second = a.rows[r];
        } else {
          for (std::size_t c = 0; c < a.rows[r].size(); ++c)
            if (const auto* v = std::get_if<double>(&a.rows[r][c]);
                v && std::find(ans.key_columns.begin(), ans.key_columns.end(), c) == ans.key_columns.end())
              slot.second[c] = std::get<double>(slot.second[c]) + *v;
        }
        ++slot.first;
      }
    }
    for (auto& [key, slot] : merged) {
      if (slot.first != k) continue;
      for (std::size_t c = 0; c < slot.second.size(); ++c)
        if (auto* v = std::get_if<double>(&slot.second[c]);
            v && std::find(ans.key_columns.begin(), ans.key_columns.end(), c) == ans.key_columns.end())
          *v /= static_cast<double>(k);
      ans.rows.push_back(std::move(slot.second));
    }
  }
  ans.provenance = Provenance::Open;
  ans.sample = plan.sample->name;
  ans.generation = GenerationStats{k, n, weight, cached, gen->best_loss, gen->history.size()};
  return ans;
}

}  // namespace ow
