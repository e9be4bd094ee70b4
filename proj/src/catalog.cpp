#include "openworld/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "openworld/csv.hpp"
#include "openworld/error.hpp"
#include "openworld/predicate.hpp"

namespace ow {

// ---------------------------------------------------------------------------
// Binning / marginals

int Binning::bin_of(double value, bool* clamped) const {
  if (clamped) *clamped = false;
  if (value < min) {
    if (clamped) *clamped = true;
    return 0;
  }
  if (value > max) {
    if (clamped) *clamped = true;
    return bins - 1;
  }
  int b = static_cast<int>(std::floor((value - min) / width()));
  return std::clamp(b, 0, bins - 1);
}

double Binning::lower(int bin) const { return min + width() * bin; }
double Binning::midpoint(int bin) const { return min + width() * (bin + 0.5); }

double Marginal::total() const {
  double t = 0.0;
  for (const auto& c : cells) t += c.count;
  return t;
}

double Marginal::numeric_coordinate(std::size_t attr, const Value& key) const {
  double v = std::get<double>(key);
  if (binning[attr]) return binning[attr]->midpoint(static_cast<int>(v));
  return v;
}

namespace {

struct KeyLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), value_less);
  }
};

std::vector<std::size_t> resolve_columns(const Table& table, const Marginal& m) {
  std::vector<std::size_t> cols;
  for (const auto& a : m.attributes) {
    auto c = table.column_index(a);
    if (!c) fail(ErrorCode::UnknownAttribute, "table lacks marginal attribute '" + a + "'");
    cols.push_back(*c);
  }
  return cols;
}

bool is_whole(double v) { return std::isfinite(v) && v == std::floor(v); }

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  if (b < e && *b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  if (b == e || res.ec != std::errc{} || res.ptr != e) return std::nullopt;
  return v;
}

}  // namespace

std::vector<Value> cell_of(const Table& table, std::size_t row, const Marginal& marginal,
                           std::span<const std::size_t> columns, bool strict) {
  std::vector<Value> key;
  key.reserve(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    std::size_t c = columns[i];
    if (table.schema()[c].is_categorical()) {
      key.push_back(table.value(row, c));
      continue;
    }
    double v = table.raw(row, c);
    if (marginal.binning[i]) {
      bool clamped = false;
      int b = marginal.binning[i]->bin_of(v, &clamped);
      if (clamped && strict)
        fail(ErrorCode::OutOfDomain, "value " + format_number(v) + " outside binning range of '" +
                                         marginal.attributes[i] + "'");
      key.emplace_back(static_cast<double>(b));
    } else {
      key.emplace_back(v);
    }
  }
  return key;
}

std::vector<Value> cell_of(const Table& table, std::size_t row, const Marginal& marginal, bool strict) {
  auto cols = resolve_columns(table, marginal);
  return cell_of(table, row, marginal, cols, strict);
}

Marginal marginal_from_table(const Table& table, std::string name, std::string owner,
                             std::vector<std::string> attributes, std::span<const double> weights, int bins) {
  if (attributes.empty()) fail(ErrorCode::ConfigError, "marginal needs at least one attribute");
  if (attributes.size() > 2) fail(ErrorCode::TooManyAttributes, "marginals cover at most 2 attributes");
  if (!weights.empty() && weights.size() != table.rows()) fail(ErrorCode::Internal, "weights/rows mismatch");
  Marginal m;
  m.name = std::move(name);
  m.owner = std::move(owner);
  m.attributes = std::move(attributes);
  std::vector<std::size_t> cols;
  for (const auto& a : m.attributes) {
    auto c = table.column_index(a);
    if (!c) fail(ErrorCode::UnknownAttribute, "relation has no attribute '" + a + "'");
    cols.push_back(*c);
    const AttributeDef& def = table.schema()[*c];
    m.kinds.push_back(def.kind);
    if (def.is_categorical()) {
      m.binning.emplace_back();
      continue;
    }
    bool whole = true;
    double lo = INFINITY, hi = -INFINITY;
    for (double v : table.column(*c)) {
      if (is_missing(v)) continue;
      whole = whole && is_whole(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (whole || !std::isfinite(lo)) {
      m.binning.emplace_back();
    } else {
      if (hi <= lo) hi = lo + 1.0;
      m.binning.push_back(Binning{lo, hi, bins});
    }
  }
  std::map<std::vector<Value>, double, KeyLess> counts;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool skip = false;
    for (auto c : cols) skip = skip || is_missing(table.raw(r, c));
    double w = weights.empty() ? 1.0 : weights[r];
    if (skip || is_missing(w)) continue;
    if (w < 0) fail(ErrorCode::NegativeCount, "negative count at row " + std::to_string(r + 1));
    counts[cell_of(table, r, m, cols)] += w;
  }
  for (auto& [key, count] : counts) m.cells.push_back({key, count});
  return m;
}

// ---------------------------------------------------------------------------
// Catalog

Catalog::Catalog(CatalogState state) : state_(std::move(state)) { validate(); }

bool Catalog::name_taken(std::string_view name) const {
  auto eq = [&](const auto& x) { return x.name == name; };
  return std::any_of(state_.populations.begin(), state_.populations.end(), eq) ||
         std::any_of(state_.samples.begin(), state_.samples.end(), eq) ||
         std::any_of(state_.tables.begin(), state_.tables.end(), eq) ||
         std::any_of(state_.marginals.begin(), state_.marginals.end(), eq);
}

bool Catalog::has_global() const {
  return std::any_of(state_.populations.begin(), state_.populations.end(),
                     [](const PopulationDef& p) { return p.is_global; });
}

const PopulationDef& Catalog::global_population() const {
  for (const auto& p : state_.populations)
    if (p.is_global) return p;
  fail(ErrorCode::NoGlobalPopulation, "no global population has been declared");
}

PopulationDef& Catalog::global_mut() {
  for (auto& p : state_.populations)
    if (p.is_global) return p;
  fail(ErrorCode::NoGlobalPopulation, "no global population has been declared");
}

const PopulationDef* Catalog::find_population(std::string_view name) const {
  for (const auto& p : state_.populations)
    if (p.name == name) return &p;
  return nullptr;
}

const SampleRelation* Catalog::find_sample(std::string_view name) const {
  for (const auto& s : state_.samples)
    if (s.name == name) return &s;
  return nullptr;
}

SampleRelation* Catalog::find_sample_mut(std::string_view name) {
  for (auto& s : state_.samples)
    if (s.name == name) return &s;
  return nullptr;
}

const AuxTable* Catalog::find_table(std::string_view name) const {
  for (const auto& t : state_.tables)
    if (t.name == name) return &t;
  return nullptr;
}

AuxTable* Catalog::find_table_mut(std::string_view name) {
  for (auto& t : state_.tables)
    if (t.name == name) return &t;
  return nullptr;
}

std::vector<const Marginal*> Catalog::marginals_of(std::string_view owner) const {
  std::vector<const Marginal*> out;
  for (const auto& m : state_.marginals)
    if (m.owner == owner) out.push_back(&m);
  return out;
}

std::string Catalog::resolve_metadata_owner(std::string_view name) const {
  if (find_population(name)) return std::string(name);
  const PopulationDef* best = nullptr;
  for (const auto& p : state_.populations) {
    if (name.size() > p.name.size() + 1 && name.substr(0, p.name.size()) == p.name && name[p.name.size()] == '_' &&
        (!best || p.name.size() > best->name.size()))
      best = &p;
  }
  if (!best)
    fail(ErrorCode::UnknownPopulation, "metadata '" + std::string(name) + "' does not name a population (use <pop> or <pop>_<suffix>)");
  return best->name;
}

void Catalog::check_predicate(const sql::Predicate& pred, const Schema& schema, bool schema_open) const {
  for (const auto& atom : pred.atoms) {
    const std::string& attr = sql::atom_attribute(atom);
    const AttributeDef* def = find_attribute_def(schema, attr);
    if (!def) {
      if (schema_open) continue;
      fail(ErrorCode::UnknownAttribute, "predicate attribute '" + attr + "' is not in the global population");
    }
    auto check_lit = [&](const sql::Literal& lit) {
      if (def->is_numeric() && std::holds_alternative<std::string>(lit) && !parse_number(std::get<std::string>(lit)))
        fail(ErrorCode::TypeMismatch, "attribute '" + attr + "' is numeric but compared with '" +
                                          std::get<std::string>(lit) + "'");
    };
    if (const auto* c = std::get_if<sql::Comparison>(&atom)) check_lit(c->value);
    else
      for (const auto& lit : std::get<sql::InList>(atom).values) check_lit(lit);
  }
}

void Catalog::register_gp_attribute(const AttributeDef& def) {
  PopulationDef& gp = global_mut();
  auto idx = find_attribute(gp.schema, def.name);
  if (idx) {
    AttributeDef* existing = &gp.schema[*idx];
    if (existing->kind != def.kind)
      fail(ErrorCode::TypeMismatch, "attribute '" + def.name + "' is " + std::string(to_string(existing->kind)) +
                                        " in the global population");
    for (const auto& v : def.domain) existing->intern(v);
    return;
  }
  if (gp.schema_declared) fail(ErrorCode::UnknownAttribute, "attribute '" + def.name + "' is not in the global population");
  AttributeDef copy = def;
  gp.schema.push_back(std::move(copy));
}

void Catalog::create_population(PopulationDef def) {
  if (name_taken(def.name)) fail(ErrorCode::DuplicateName, "name '" + def.name + "' already exists");
  if (def.is_global) {
    if (has_global()) fail(ErrorCode::DuplicateName, "a global population already exists ('" + global_population().name + "')");
    def.source.clear();
    std::set<std::string> names;
    for (const auto& a : def.schema)
      if (!names.insert(a.name).second) fail(ErrorCode::DuplicateName, "duplicate attribute '" + a.name + "'");
    state_.populations.push_back(std::move(def));
    return;
  }
  if (!has_global()) fail(ErrorCode::NoGlobalPopulation, "declare a GLOBAL population before '" + def.name + "'");
  const PopulationDef& gp = global_population();
  if (def.source != gp.name)
    fail(ErrorCode::UnknownPopulation, "population '" + def.name + "' must select from the global population '" + gp.name + "'");
  check_predicate(def.predicate, gp.schema, !gp.schema_declared);
  state_.populations.push_back(std::move(def));
}

void Catalog::create_population(const sql::CreatePopulation& stmt) {
  PopulationDef def;
  def.name = stmt.name;
  def.is_global = stmt.global;
  for (const auto& c : stmt.columns) def.schema.push_back(AttributeDef{c.name, c.kind, {}, {}});
  def.schema_declared = !stmt.columns.empty();
  if (stmt.global) {
    if (stmt.view) fail(ErrorCode::ConfigError, "a GLOBAL population cannot be defined as a view");
  } else {
    if (!stmt.view) fail(ErrorCode::NoGlobalPopulation, "population '" + stmt.name + "' must be defined AS (SELECT ... FROM <global>)");
    def.source = stmt.view->source;
    def.predicate = stmt.view->where;
    if (has_global() && def.schema.empty()) {
      const auto& gp = global_population();
      if (stmt.view->star) {
        def.schema = gp.schema;
      } else {
        for (const auto& col : stmt.view->columns) {
          const AttributeDef* a = find_attribute_def(gp.schema, col);
          if (a) def.schema.push_back(*a);
          else if (gp.schema_declared) fail(ErrorCode::UnknownAttribute, "attribute '" + col + "' is not in the global population");
        }
      }
    }
  }
  create_population(std::move(def));
}

void Catalog::create_sample(const std::string& name, std::vector<sql::ColumnDef> columns, const sql::ViewDef& view,
                            std::optional<sql::Mechanism> mechanism) {
  if (name_taken(name)) fail(ErrorCode::DuplicateName, "name '" + name + "' already exists");
  if (!has_global()) fail(ErrorCode::NoGlobalPopulation, "declare a GLOBAL population before sample '" + name + "'");
  const PopulationDef& gp = global_population();
  if (view.source != gp.name)
    fail(ErrorCode::UnknownPopulation, "sample '" + name + "' must select from the global population '" + gp.name + "'");
  if (mechanism && !(mechanism->percent > 0.0 && mechanism->percent <= 100.0))
    fail(ErrorCode::InvalidPercent, "PERCENT must be in (0, 100], got " + format_number(mechanism->percent));

  SampleRelation s;
  s.name = name;
  s.source = gp.name;
  s.predicate = view.where;
  s.mechanism = mechanism;
  if (!view.star) s.view_columns = view.columns;

  Schema schema;
  bool fixed = false;
  if (!columns.empty()) {
    for (const auto& c : columns) {
      AttributeDef def{c.name, c.kind, {}, {}};
      register_gp_attribute(def);
      schema.push_back(def);
    }
    fixed = true;
  } else if (!view.star) {
    fixed = true;
    for (const auto& col : view.columns) {
      const AttributeDef* a = find_attribute_def(gp.schema, col);
      if (!a) {
        if (gp.schema_declared) fail(ErrorCode::UnknownAttribute, "attribute '" + col + "' is not in the global population");
        fixed = false;
        break;
      }
      schema.push_back(AttributeDef{a->name, a->kind, {}, a->range});
    }
  } else if (gp.schema_declared) {
    for (const auto& a : gp.schema) schema.push_back(AttributeDef{a.name, a.kind, {}, a.range});
    fixed = true;
  }
  std::set<std::string> seen;
  for (const auto& a : schema)
    if (!seen.insert(a.name).second) fail(ErrorCode::DuplicateName, "duplicate attribute '" + a.name + "'");
  if (mechanism && mechanism->kind == sql::MechanismKind::Stratified &&
      !find_attribute_def(global_population().schema, mechanism->strat_attribute))
    fail(ErrorCode::UnknownAttribute, "stratification attribute '" + mechanism->strat_attribute + "' is not in the global population");
  check_predicate(view.where, global_population().schema, !global_population().schema_declared);

  if (fixed) s.data = Table(std::move(schema));
  s.schema_declared = fixed;
  state_.samples.push_back(std::move(s));
}

void Catalog::create_sample(const sql::CreateSample& stmt) {
  create_sample(stmt.name, stmt.columns, stmt.view, stmt.mechanism);
}

void Catalog::create_table(const sql::CreateTable& stmt) {
  if (name_taken(stmt.name)) fail(ErrorCode::DuplicateName, "name '" + stmt.name + "' already exists");
  AuxTable t;
  t.name = stmt.name;
  t.temporary = stmt.temporary;
  Schema schema;
  std::set<std::string> seen;
  for (const auto& c : stmt.columns) {
    if (!seen.insert(c.name).second) fail(ErrorCode::DuplicateName, "duplicate column '" + c.name + "'");
    schema.push_back(AttributeDef{c.name, c.kind, {}, {}});
  }
  t.schema_declared = !stmt.columns.empty();
  t.data = Table(std::move(schema));
  state_.tables.push_back(std::move(t));
}

void Catalog::add_marginal(Marginal m) {
  const PopulationDef* owner = find_population(m.owner);
  if (!owner) fail(ErrorCode::UnknownPopulation, "no population '" + m.owner + "'");
  if (m.attributes.empty()) fail(ErrorCode::ConfigError, "marginal needs at least one attribute");
  if (m.attributes.size() > 2) fail(ErrorCode::TooManyAttributes, "marginals cover at most 2 attributes");
  if (m.attributes.size() == 2 && m.attributes[0] == m.attributes[1])
    fail(ErrorCode::DuplicateName, "marginal attributes must differ");
  if (m.kinds.size() != m.attributes.size() || m.binning.size() != m.attributes.size())
    fail(ErrorCode::Internal, "marginal metadata arity mismatch");
  if (m.name.empty()) {
    int k = 1;
    do {
      m.name = m.owner + "_M" + std::to_string(k++);
    } while (name_taken(m.name));
  }
  if (name_taken(m.name)) fail(ErrorCode::DuplicateName, "name '" + m.name + "' already exists");
  std::set<std::string> attrs(m.attributes.begin(), m.attributes.end());
  for (const auto& other : state_.marginals)
    if (other.owner == m.owner && std::set<std::string>(other.attributes.begin(), other.attributes.end()) == attrs)
      fail(ErrorCode::DuplicateName, "population '" + m.owner + "' already has a marginal over these attributes");
  std::set<std::vector<Value>, KeyLess> keys;
  double total = 0.0;
  for (const auto& c : m.cells) {
    if (c.key.size() != m.attributes.size()) fail(ErrorCode::TypeMismatch, "cell key arity mismatch");
    if (!(c.count >= 0.0) || !std::isfinite(c.count)) fail(ErrorCode::NegativeCount, "cell count " + format_number(c.count) + " is negative");
    for (std::size_t i = 0; i < c.key.size(); ++i) {
      bool is_str = std::holds_alternative<std::string>(c.key[i]);
      if (is_str != (m.kinds[i] == AttributeKind::Categorical))
        fail(ErrorCode::TypeMismatch, "cell key for '" + m.attributes[i] + "' has the wrong type");
    }
    if (!keys.insert(c.key).second) fail(ErrorCode::DuplicateName, "duplicate marginal cell");
    total += c.count;
  }
  if (!(total > 0.0)) fail(ErrorCode::NegativeCount, "marginal total must be positive");
  if (!owner->is_global && owner->schema_declared)
    for (const auto& a : m.attributes)
      if (!find_attribute_def(owner->schema, a))
        fail(ErrorCode::UnknownAttribute, "population '" + owner->name + "' has no attribute '" + a + "'");
  // Marginal categories extend the global active domains.
  for (std::size_t i = 0; i < m.attributes.size(); ++i) {
    AttributeDef def{m.attributes[i], m.kinds[i], {}, {}};
    if (def.is_categorical())
      for (const auto& c : m.cells) def.intern(std::get<std::string>(c.key[i]));
    register_gp_attribute(def);
  }
  state_.marginals.push_back(std::move(m));
}

void Catalog::create_metadata(const std::string& owner, std::vector<std::string> attributes,
                              std::vector<MarginalCell> cells, std::string name,
                              std::vector<std::optional<Binning>> binning) {
  if (!find_population(owner)) fail(ErrorCode::UnknownPopulation, "no population '" + owner + "'");
  if (attributes.size() > 2) fail(ErrorCode::TooManyAttributes, "marginals cover at most 2 attributes");
  Marginal m;
  m.name = std::move(name);
  m.owner = owner;
  m.attributes = std::move(attributes);
  if (binning.empty()) binning.resize(m.attributes.size());
  m.binning = std::move(binning);
  const Schema& gp_schema = global_population().schema;
  for (std::size_t i = 0; i < m.attributes.size(); ++i) {
    if (const AttributeDef* def = find_attribute_def(gp_schema, m.attributes[i])) {
      m.kinds.push_back(def->kind);
    } else if (!cells.empty() && i < cells.front().key.size()) {
      m.kinds.push_back(std::holds_alternative<std::string>(cells.front().key[i]) ? AttributeKind::Categorical
                                                                                  : AttributeKind::Numeric);
    } else {
      m.kinds.push_back(AttributeKind::Numeric);
    }
  }
  m.cells = std::move(cells);
  add_marginal(std::move(m));
}

void Catalog::create_metadata(const sql::CreateMetadata& stmt) {
  std::string owner = resolve_metadata_owner(stmt.name);
  if (stmt.attributes.size() > 2) fail(ErrorCode::TooManyAttributes, "marginals cover at most 2 attributes");
  const AuxTable* aux = find_table(stmt.source);
  if (!aux) fail(ErrorCode::UnknownRelation, "no auxiliary table '" + stmt.source + "'");
  if (!stmt.group_by.empty() &&
      std::set<std::string>(stmt.group_by.begin(), stmt.group_by.end()) !=
          std::set<std::string>(stmt.attributes.begin(), stmt.attributes.end()))
    fail(ErrorCode::ConfigError, "GROUP BY must list exactly the metadata attributes");
  Table rows = aux->data;
  if (!stmt.where.empty()) rows = rows.filter_rows(evaluate_predicate(stmt.where, rows));
  std::vector<double> weights;
  if (!stmt.count_column.empty()) {
    auto c = rows.column_index(stmt.count_column);
    if (!c) fail(ErrorCode::UnknownAttribute, "table '" + aux->name + "' has no column '" + stmt.count_column + "'");
    if (!rows.schema()[*c].is_numeric()) fail(ErrorCode::TypeMismatch, "count column '" + stmt.count_column + "' is not numeric");
    auto col = rows.column(*c);
    weights.assign(col.begin(), col.end());
  }
  Marginal m = marginal_from_table(rows, stmt.name, owner, stmt.attributes, weights);
  // The GP's declared kinds win over what the auxiliary table inferred.
  const Schema& gp_schema = global_population().schema;
  for (std::size_t i = 0; i < m.attributes.size(); ++i) {
    const AttributeDef* def = find_attribute_def(gp_schema, m.attributes[i]);
    if (!def || def->kind == m.kinds[i]) continue;
    if (def->is_categorical()) {
      m.kinds[i] = AttributeKind::Categorical;
      m.binning[i].reset();
      for (auto& c : m.cells) c.key[i] = format_number(std::get<double>(c.key[i]));
    } else {
      fail(ErrorCode::TypeMismatch, "attribute '" + m.attributes[i] + "' is numeric in the global population");
    }
  }
  add_marginal(std::move(m));
}

std::size_t Catalog::append_typed(Table& table, bool& schema_fixed, const std::vector<std::string>& header,
                                  const std::vector<std::vector<std::string>>& rows, std::span<const int> lines,
                                  bool reject_missing) {
  const int first_line = lines.empty() ? 2 : lines.front();
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != header.size()) fail(ErrorCode::ParseError, "wrong number of fields", {lines[r], 0});
  std::map<std::string, std::size_t> header_index;
  for (std::size_t i = 0; i < header.size(); ++i) header_index.emplace(header[i], i);
  if (!schema_fixed) {
    Schema schema;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i].empty()) fail(ErrorCode::ParseError, "empty column name in header", {first_line - 1, 0});
      bool numeric = true, any = false;
      for (const auto& r : rows) {
        if (r[i].empty()) continue;
        any = true;
        if (!parse_number(r[i])) {
          numeric = false;
          break;
        }
      }
      schema.push_back(AttributeDef{header[i], (numeric && any) ? AttributeKind::Numeric : AttributeKind::Categorical, {}, {}});
    }
    table = Table(std::move(schema));
    schema_fixed = true;
  }
  std::vector<std::size_t> src;
  for (const auto& def : table.schema()) {
    auto it = header_index.find(def.name);
    if (it == header_index.end()) fail(ErrorCode::TypeMismatch, "input lacks column '" + def.name + "'");
    src.push_back(it->second);
  }
  table.reserve(table.rows() + rows.size());
  std::vector<double> raw(table.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int line = lines[r];
    const auto& fields = rows[r];
    if (fields.size() != header.size()) fail(ErrorCode::ParseError, "wrong number of fields", {line, 0});
    for (std::size_t c = 0; c < src.size(); ++c) {
      const std::string& f = fields[src[c]];
      const AttributeDef& def = table.schema()[c];
      if (f.empty()) {
        if (reject_missing) fail(ErrorCode::ParseError, "missing value for '" + def.name + "'", {line, 0});
        raw[c] = kMissing;
        continue;
      }
      if (def.is_numeric()) {
        auto v = parse_number(f);
        if (!v) fail(ErrorCode::ParseError, "'" + f + "' is not a number (column '" + def.name + "')", {line, 0});
        raw[c] = *v;
      } else {
        raw[c] = table.intern(c, f);
      }
    }
    table.append_raw(raw);
  }
  return rows.size();
}

std::size_t Catalog::ingest_rows(const std::string& target, const std::vector<std::string>& header,
                                 const std::vector<std::vector<std::string>>& rows, int first_line) {
  std::vector<int> lines(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) lines[i] = first_line + static_cast<int>(i);
  return ingest_lines(target, header, rows, lines);
}

std::size_t Catalog::ingest_lines(const std::string& target, const std::vector<std::string>& header,
                                  const std::vector<std::vector<std::string>>& rows, std::span<const int> lines) {
  if (AuxTable* t = find_table_mut(target)) {
    bool fixed = t->schema_declared || t->data.cols() > 0;
    Table staged = t->data;
    std::size_t n = append_typed(staged, fixed, header, rows, lines, false);
    t->data = std::move(staged);
    return n;
  }
  SampleRelation* s = find_sample_mut(target);
  if (!s) fail(ErrorCode::UnknownRelation, "no sample or table named '" + target + "'");
  bool fixed = s->schema_declared || s->data.cols() > 0;
  Table staged = s->data;
  std::vector<std::string> use_header = header;
  std::vector<std::vector<std::string>> use_rows;
  const std::vector<std::vector<std::string>>* rows_ptr = &rows;
  if (!fixed) {
    // Restrict inference to the view's columns; take kinds from the GP when known.
    std::vector<std::size_t> pick;
    if (s->view_columns.empty()) {
      for (std::size_t i = 0; i < header.size(); ++i) pick.push_back(i);
    } else {
      for (const auto& col : s->view_columns) {
        auto it = std::find(header.begin(), header.end(), col);
        if (it == header.end()) fail(ErrorCode::TypeMismatch, "input lacks column '" + col + "'");
        pick.push_back(static_cast<std::size_t>(it - header.begin()));
      }
    }
    use_header.clear();
    for (auto i : pick) use_header.push_back(header[i]);
    use_rows.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != header.size()) fail(ErrorCode::ParseError, "wrong number of fields", {lines[r], 0});
      std::vector<std::string> f;
      for (auto i : pick) f.push_back(rows[r][i]);
      use_rows.push_back(std::move(f));
    }
    rows_ptr = &use_rows;
    const Schema& gp = global_population().schema;
    Schema schema;
    for (const auto& h : use_header) {
      const AttributeDef* known = find_attribute_def(gp, h);
      if (known) {
        schema.push_back(AttributeDef{h, known->kind, {}, known->range});
        continue;
      }
      bool numeric = true, any = false;
      std::size_t col = schema.size();
      for (const auto& r : use_rows) {
        if (r[col].empty()) continue;
        any = true;
        if (!parse_number(r[col])) {
          numeric = false;
          break;
        }
      }
      schema.push_back(AttributeDef{h, (numeric && any) ? AttributeKind::Numeric : AttributeKind::Categorical, {}, {}});
    }
    staged = Table(std::move(schema));
    fixed = true;
  }
  std::size_t n = append_typed(staged, fixed, use_header, *rows_ptr, lines, true);
  for (const auto& def : staged.schema()) register_gp_attribute(def);
  s->data = std::move(staged);
  s->schema_declared = true;
  s->weights.resize(s->data.rows(), 1.0);
  return n;
}

std::size_t Catalog::ingest_csv(const std::string& target, const std::string& path) {
  csv::Document doc = csv::read_file(path);
  if (doc.header.empty() && doc.records.empty()) {
    if (!find_table(target) && !find_sample(target)) fail(ErrorCode::UnknownRelation, "no sample or table named '" + target + "'");
    return 0;
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;
  rows.reserve(doc.records.size());
  for (auto& rec : doc.records) {
    rows.push_back(std::move(rec.fields));
    lines.push_back(rec.line);
  }
  return ingest_lines(target, doc.header, rows, lines);
}

std::size_t Catalog::ingest_table(const std::string& target, const Table& rows) {
  std::vector<std::string> header;
  for (const auto& a : rows.schema()) header.push_back(a.name);
  std::vector<std::vector<std::string>> text(rows.rows(), std::vector<std::string>(rows.cols()));
  for (std::size_t r = 0; r < rows.rows(); ++r)
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      double v = rows.raw(r, c);
      text[r][c] = is_missing(v) ? std::string{} : format_value(rows.value(r, c));
    }
  return ingest_rows(target, header, text);
}

void Catalog::set_weights(const std::string& sample, std::vector<double> weights) {
  SampleRelation* s = find_sample_mut(sample);
  if (!s) fail(ErrorCode::UnknownRelation, "no sample '" + sample + "'");
  if (weights.size() != s->rows())
    fail(ErrorCode::TypeMismatch, "expected " + std::to_string(s->rows()) + " weights, got " + std::to_string(weights.size()));
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::NegativeCount, "weights must be finite and nonnegative");
  s->weights = std::move(weights);
}

void Catalog::validate() const {
  std::set<std::string> names;
  auto unique = [&](const std::string& n) {
    if (!names.insert(n).second) fail(ErrorCode::DuplicateName, "name '" + n + "' is used twice");
  };
  int globals = 0;
  std::string gp_name;
  for (const auto& p : state_.populations) {
    unique(p.name);
    if (p.is_global) {
      ++globals;
      gp_name = p.name;
    }
  }
  if (globals > 1) fail(ErrorCode::DuplicateName, "more than one global population");
  bool anything = !state_.samples.empty() || !state_.marginals.empty() || state_.populations.size() > std::size_t(globals);
  if (globals == 0 && anything) fail(ErrorCode::NoGlobalPopulation, "catalog objects exist without a global population");
  for (const auto& p : state_.populations) {
    if (p.is_global != p.source.empty()) fail(ErrorCode::UnknownPopulation, "population '" + p.name + "' has an invalid source");
    if (!p.is_global && p.source != gp_name) fail(ErrorCode::UnknownPopulation, "population '" + p.name + "' does not reference the global population");
  }
  for (const auto& t : state_.tables) unique(t.name);
  for (const auto& s : state_.samples) {
    unique(s.name);
    if (s.source != gp_name) fail(ErrorCode::UnknownPopulation, "sample '" + s.name + "' does not reference the global population");
    if (s.weights.size() != s.rows()) fail(ErrorCode::TypeMismatch, "sample '" + s.name + "' weight count differs from row count");
    for (double w : s.weights)
      if (!(w >= 0.0)) fail(ErrorCode::NegativeCount, "sample '" + s.name + "' has a negative weight");
    if (s.mechanism && !(s.mechanism->percent > 0.0 && s.mechanism->percent <= 100.0))
      fail(ErrorCode::InvalidPercent, "sample '" + s.name + "' has an invalid percent");
  }
  for (const auto& m : state_.marginals) {
    unique(m.name);
    if (!find_population(m.owner)) fail(ErrorCode::UnknownPopulation, "marginal '" + m.name + "' has unknown owner");
    if (m.attributes.empty() || m.attributes.size() > 2) fail(ErrorCode::TooManyAttributes, "marginal '" + m.name + "' arity");
    double total = 0.0;
    for (const auto& c : m.cells) {
      if (c.key.size() != m.attributes.size() || !(c.count >= 0.0))
        fail(ErrorCode::NegativeCount, "marginal '" + m.name + "' has an invalid cell");
      total += c.count;
    }
    if (!(total > 0.0)) fail(ErrorCode::NegativeCount, "marginal '" + m.name + "' has zero total");
  }
}

}  // namespace ow
