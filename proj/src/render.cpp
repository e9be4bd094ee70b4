#include <sstream>

#include "openworld/parser.hpp"

namespace ow::sql {

namespace {

std::string kind_name(AttributeKind k) { return k == AttributeKind::Numeric ? "NUMERIC" : "TEXT"; }

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

std::string column_defs(const std::vector<ColumnDef>& cols) {
  if (cols.empty()) return "";
  std::string out = " (";
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ", ";
    out += cols[i].name + " " + kind_name(cols[i].kind);
  }
  return out + ")";
}

std::string view_text(const ViewDef& v) {
  std::string out = "SELECT " + (v.star ? std::string("*") : join(v.columns)) + " FROM " + v.source;
  if (!v.where.empty()) out += " WHERE " + render_predicate(v.where);
  return out;
}

std::string item_text(const SelectItem& item) {
  if (const auto* a = std::get_if<AttributeRef>(&item)) return a->name;
  return aggregate_label(std::get<Aggregate>(item));
}

struct Renderer {
  std::string operator()(const CreateTable& s) const {
    return std::string("CREATE ") + (s.temporary ? "TEMPORARY " : "") + "TABLE " + s.name + column_defs(s.columns) +
           ";";
  }
  std::string operator()(const CreatePopulation& s) const {
    std::string out = std::string("CREATE ") + (s.global ? "GLOBAL " : "") + "POPULATION " + s.name +
                      column_defs(s.columns);
    if (s.view) out += " AS (" + view_text(*s.view) + ")";
    return out + ";";
  }
  std::string operator()(const CreateSample& s) const {
    std::string out = "CREATE SAMPLE " + s.name + column_defs(s.columns) + " AS (" + view_text(s.view);
    if (s.mechanism) {
      out += " USING MECHANISM ";
      if (s.mechanism->kind == MechanismKind::Uniform) out += "UNIFORM";
      else out += "STRATIFIED ON " + s.mechanism->strat_attribute;
      out += " PERCENT " + format_number(s.mechanism->percent);
    }
    return out + ");";
  }
  std::string operator()(const CreateMetadata& s) const {
    std::string out = "CREATE METADATA " + s.name + " AS (SELECT " + join(s.attributes) + ", " +
                      (s.count_column.empty() ? std::string("COUNT(*)") : s.count_column) + " FROM " + s.source;
    if (!s.where.empty()) out += " WHERE " + render_predicate(s.where);
    if (!s.group_by.empty()) out += " GROUP BY " + join(s.group_by);
    return out + ");";
  }
  std::string operator()(const Ingest& s) const { return "INGEST " + s.relation + " FROM " + render_literal(s.path) + ";"; }
  std::string operator()(const SelectQuery& q) const {
    std::string out = "SELECT " + std::string(to_string(q.visibility)) + " ";
    if (q.star) {
      out += "*";
    } else {
      for (std::size_t i = 0; i < q.items.size(); ++i) {
        if (i) out += ", ";
        out += item_text(q.items[i]);
      }
    }
    out += " FROM " + q.source;
    if (!q.where.empty()) out += " WHERE " + render_predicate(q.where);
    if (!q.group_by.empty()) out += " GROUP BY " + join(q.group_by);
    return out + ";";
  }
};

}  // namespace

std::string render_literal(const Literal& lit) {
  if (const double* d = std::get_if<double>(&lit)) return format_number(*d);
  std::string out = "'";
  for (char c : std::get<std::string>(lit)) {
    if (c == '\'') out += "''";
    else out.push_back(c);
  }
  return out + "'";
}

std::string render_predicate(const Predicate& pred) {
  std::string out;
  for (std::size_t i = 0; i < pred.atoms.size(); ++i) {
    if (i) out += " AND ";
    const Atom& a = pred.atoms[i];
    if (const auto* c = std::get_if<Comparison>(&a)) {
      out += c->attribute + " " + std::string(to_string(c->op)) + " " + render_literal(c->value);
    } else {
      const auto& in = std::get<InList>(a);
      out += in.attribute + " IN (";
      for (std::size_t j = 0; j < in.values.size(); ++j) {
        if (j) out += ", ";
        out += render_literal(in.values[j]);
      }
      out += ")";
    }
  }
  return out;
}

std::string render(const StatementBody& stmt) { return std::visit(Renderer{}, stmt); }

std::string render(const std::vector<StatementBody>& stmts) {
  std::string out;
  for (const auto& s : stmts) out += render(s) + "\n";
  return out;
}

std::string render(const std::vector<Statement>& stmts) {
  std::string out;
  for (const auto& s : stmts) out += render(s.body) + "\n";
  return out;
}

}  // namespace ow::sql
