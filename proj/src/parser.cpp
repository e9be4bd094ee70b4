#include "openworld/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "openworld/lexer.hpp"

namespace ow::sql {

namespace {

constexpr std::array<std::string_view, 30> kReserved = {
    "SELECT", "FROM",   "WHERE",     "GROUP",   "BY",     "AND",     "IN",         "AS",
    "CREATE", "GLOBAL", "POPULATION", "SAMPLE", "METADATA", "TABLE", "TEMPORARY",  "TEMP",
    "USING",  "MECHANISM", "PERCENT", "UNIFORM", "STRATIFIED", "ON", "INGEST",     "COUNT",
    "SUM",    "AVG",    "CLOSED",    "OPEN",    "SEMI",   "OR"};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::String: return "string '" + t.text + "'";
    case TokenKind::Number: return "number " + t.text;
    default: return "'" + t.text + "'";
  }
}

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += ", ";
    out += expected[i];
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text), toks_(tokenize(text)) {}

  std::vector<Statement> script() {
    std::vector<Statement> out;
    while (peek().kind != TokenKind::End) {
      const Token& first = peek();
      Statement st;
      st.span.start = first.where;
      st.span.begin = first.offset;
      st.body = statement();
      expect_symbol(";");
      st.span.end = toks_[pos_ - 1].offset + toks_[pos_ - 1].length;
      out.push_back(std::move(st));
    }
    return out;
  }

  Predicate bare_predicate() {
    Predicate p = predicate();
    if (peek().kind != TokenKind::End) error({"AND", "end of input"});
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void error(std::vector<std::string> expected) const {
    throw SyntaxError(peek().where, std::move(expected), describe(peek()));
  }

  bool is_keyword(const Token& t, std::string_view kw) const {
    return t.kind == TokenKind::Identifier && iequals(t.text, kw);
  }
  bool at_keyword(std::string_view kw) const { return is_keyword(peek(), kw); }
  bool accept_keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) error({std::string(kw)});
  }
  bool at_symbol(std::string_view s) const { return peek().kind == TokenKind::Symbol && peek().text == s; }
  bool accept_symbol(std::string_view s) {
    if (!at_symbol(s)) return false;
    ++pos_;
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) error({"'" + std::string(s) + "'"});
  }

  std::string identifier(std::string_view what = "identifier") {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier || is_reserved(t.text)) error({std::string(what)});
    ++pos_;
    return t.text;
  }

  StatementBody statement() {
    if (accept_keyword("CREATE")) return create();
    if (accept_keyword("INGEST")) return ingest();
    if (at_keyword("SELECT")) return select();
    error({"CREATE", "INGEST", "SELECT"});
  }

  StatementBody create() {
    if (accept_keyword("TEMPORARY") || accept_keyword("TEMP")) {
      expect_keyword("TABLE");
      return create_table(true);
    }
    if (accept_keyword("TABLE")) return create_table(false);
    if (accept_keyword("GLOBAL")) {
      expect_keyword("POPULATION");
      return create_population(true);
    }
    if (accept_keyword("POPULATION")) return create_population(false);
    if (accept_keyword("SAMPLE")) return create_sample();
    if (accept_keyword("METADATA")) return create_metadata();
    error({"TEMPORARY", "TABLE", "GLOBAL", "POPULATION", "SAMPLE", "METADATA"});
  }

  AttributeKind type_name() {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) error({"type name"});
    static constexpr std::array<std::string_view, 9> numeric = {"NUMERIC", "REAL",   "FLOAT",   "DOUBLE", "INT",
                                                                "INTEGER", "BIGINT", "DECIMAL", "NUMBER"};
    static constexpr std::array<std::string_view, 6> categorical = {"TEXT", "VARCHAR", "STRING",
                                                                    "CHAR", "CATEGORICAL", "CATEGORY"};
    AttributeKind kind;
    if (std::any_of(numeric.begin(), numeric.end(), [&](auto k) { return iequals(t.text, k); }))
      kind = AttributeKind::Numeric;
    else if (std::any_of(categorical.begin(), categorical.end(), [&](auto k) { return iequals(t.text, k); }))
      kind = AttributeKind::Categorical;
    else
      error({"NUMERIC", "TEXT"});
    ++pos_;
    // VARCHAR(32), DECIMAL(10, 2): size arguments carry no meaning here.
    if (at_symbol("(") && peek(1).kind == TokenKind::Number) {
      ++pos_;
      while (!at_symbol(")")) {
        if (peek().kind == TokenKind::End) error({"')'"});
        ++pos_;
      }
      ++pos_;
    }
    return kind;
  }

  std::vector<ColumnDef> optional_column_defs() {
    std::vector<ColumnDef> cols;
    if (!accept_symbol("(")) return cols;
    do {
      ColumnDef c;
      c.name = identifier("column name");
      c.kind = type_name();
      cols.push_back(std::move(c));
    } while (accept_symbol(","));
    expect_symbol(")");
    return cols;
  }

  CreateTable create_table(bool temporary) {
    CreateTable ct;
    ct.temporary = temporary;
    ct.name = identifier("table name");
    ct.columns = optional_column_defs();
    return ct;
  }

  ViewDef view_select() {
    ViewDef v;
    expect_keyword("SELECT");
    if (accept_symbol("*")) {
      v.star = true;
    } else {
      v.star = false;
      do {
        v.columns.push_back(identifier("column name"));
      } while (accept_symbol(","));
    }
    expect_keyword("FROM");
    v.source = identifier("relation name");
    if (accept_keyword("WHERE")) v.where = predicate();
    return v;
  }

  CreatePopulation create_population(bool global) {
    CreatePopulation cp;
    cp.global = global;
    cp.name = identifier("population name");
    cp.columns = optional_column_defs();
    if (accept_keyword("AS")) {
      expect_symbol("(");
      cp.view = view_select();
      expect_symbol(")");
    }
    return cp;
  }

  CreateSample create_sample() {
    CreateSample cs;
    cs.name = identifier("sample name");
    cs.columns = optional_column_defs();
    expect_keyword("AS");
    expect_symbol("(");
    cs.view = view_select();
    if (accept_keyword("USING")) {
      expect_keyword("MECHANISM");
      Mechanism m;
      if (accept_keyword("UNIFORM")) {
        m.kind = MechanismKind::Uniform;
      } else if (accept_keyword("STRATIFIED")) {
        m.kind = MechanismKind::Stratified;
        expect_keyword("ON");
        m.strat_attribute = identifier("attribute name");
      } else {
        error({"UNIFORM", "STRATIFIED"});
      }
      expect_keyword("PERCENT");
      if (peek().kind != TokenKind::Number) error({"number"});
      m.percent = take().number;
      cs.mechanism = m;
    }
    expect_symbol(")");
    return cs;
  }

  CreateMetadata create_metadata() {
    CreateMetadata md;
    md.name = identifier("metadata name");
    expect_keyword("AS");
    expect_symbol("(");
    expect_keyword("SELECT");
    // Items: attributes..., then a trailing COUNT(*) or count column.
    std::vector<std::string> items;
    bool count_star = false;
    for (;;) {
      if (at_keyword("COUNT")) {
        ++pos_;
        expect_symbol("(");
        expect_symbol("*");
        expect_symbol(")");
        count_star = true;
        break;
      }
      items.push_back(identifier("attribute name"));
      if (!accept_symbol(",")) break;
    }
    if (count_star) {
      md.attributes = std::move(items);
    } else {
      if (items.size() < 2) error({"','", "COUNT"});
      md.count_column = items.back();
      items.pop_back();
      md.attributes = std::move(items);
    }
    if (md.attributes.empty()) error({"attribute name"});
    expect_keyword("FROM");
    md.source = identifier("relation name");
    if (accept_keyword("WHERE")) md.where = predicate();
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      do {
        md.group_by.push_back(identifier("attribute name"));
      } while (accept_symbol(","));
    }
    expect_symbol(")");
    return md;
  }

  Ingest ingest() {
    Ingest in;
    in.relation = identifier("relation name");
    expect_keyword("FROM");
    if (peek().kind != TokenKind::String) error({"quoted path"});
    in.path = take().text;
    return in;
  }

  SelectItem select_item() {
    auto aggregate_arg = [&](AggregateFn fn) {
      ++pos_;
      expect_symbol("(");
      Aggregate a{fn, identifier("attribute name")};
      expect_symbol(")");
      return a;
    };
    if (at_keyword("COUNT")) {
      ++pos_;
      expect_symbol("(");
      expect_symbol("*");
      expect_symbol(")");
      return Aggregate{AggregateFn::CountStar, {}};
    }
    if (at_keyword("SUM")) return aggregate_arg(AggregateFn::Sum);
    if (at_keyword("AVG")) return aggregate_arg(AggregateFn::Avg);
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier || is_reserved(t.text))
      error({"attribute name", "COUNT", "SUM", "AVG", "'*'"});
    ++pos_;
    return AttributeRef{t.text};
  }

  SelectQuery select() {
    const Token& start = peek();
    expect_keyword("SELECT");
    SelectQuery q;
    if (peek().kind == TokenKind::SemiOpen) {
      ++pos_;
      q.visibility = Visibility::SemiOpen;
    } else if (accept_keyword("OPEN")) {
      q.visibility = Visibility::Open;
    } else if (accept_keyword("CLOSED")) {
      q.visibility = Visibility::Closed;
    }
    if (accept_symbol("*")) {
      q.star = true;
    } else {
      do {
        q.items.push_back(select_item());
      } while (accept_symbol(","));
    }
    if (!at_keyword("FROM")) error({"','", "FROM"});
    ++pos_;
    q.source = identifier("population name");
    if (accept_keyword("WHERE")) q.where = predicate();
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      do {
        q.group_by.push_back(identifier("attribute name"));
      } while (accept_symbol(","));
    }
    validate_grouping(q, start.where);
    return q;
  }

  void validate_grouping(const SelectQuery& q, SourceLocation where) const {
    std::vector<std::string> plain;
    for (const auto& item : q.items)
      if (const auto* a = std::get_if<AttributeRef>(&item)) plain.push_back(a->name);
    for (const auto& g : q.group_by)
      if (std::find(plain.begin(), plain.end(), g) == plain.end())
        throw SyntaxError(where, {"group-by attribute in projection"}, "GROUP BY " + g);
    if (q.has_aggregates()) {
      for (const auto& p : plain)
        if (std::find(q.group_by.begin(), q.group_by.end(), p) == q.group_by.end())
          throw SyntaxError(where, {"GROUP BY " + p}, "non-aggregated attribute " + p + " without GROUP BY");
    } else if (!q.group_by.empty()) {
      throw SyntaxError(where, {"aggregate"}, "GROUP BY without aggregates");
    }
    if (q.star && !q.group_by.empty()) throw SyntaxError(where, {"projection list"}, "GROUP BY with '*'");
  }

  Predicate predicate() {
    Predicate p;
    do {
      p.atoms.push_back(atom());
    } while (accept_keyword("AND"));
    return p;
  }

  Atom atom() {
    std::string attr = identifier("attribute name");
    if (accept_keyword("IN")) {
      InList in{attr, {}};
      std::string close;
      if (accept_symbol("(")) close = ")";
      else if (accept_symbol("[")) close = "]";
      else error({"'('", "'['"});
      do {
        in.values.push_back(literal());
      } while (accept_symbol(","));
      expect_symbol(close);
      return in;
    }
    Comparison c;
    c.attribute = std::move(attr);
    const Token& t = peek();
    if (t.kind != TokenKind::Symbol) error({"'='", "'<'", "'>'", "'<='", "'>='", "IN"});
    if (t.text == "=") c.op = CompareOp::Eq;
    else if (t.text == "<") c.op = CompareOp::Lt;
    else if (t.text == ">") c.op = CompareOp::Gt;
    else if (t.text == "<=") c.op = CompareOp::Le;
    else if (t.text == ">=") c.op = CompareOp::Ge;
    else error({"'='", "'<'", "'>'", "'<='", "'>='", "IN"});
    ++pos_;
    c.value = literal();
    return c;
  }

  Literal literal() {
    const Token& t = peek();
    if (t.kind == TokenKind::Number) {
      ++pos_;
      return t.number;
    }
    if (t.kind == TokenKind::Symbol && t.text == "-" && peek(1).kind == TokenKind::Number) {
      pos_ += 2;
      return -toks_[pos_ - 1].number;
    }
    if (t.kind == TokenKind::String) {
      ++pos_;
      return t.text;
    }
    // Bare words on the right-hand side are string constants (`email = Yahoo`).
    if (t.kind == TokenKind::Identifier && !is_reserved(t.text)) {
      ++pos_;
      return t.text;
    }
    error({"literal"});
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SyntaxError::SyntaxError(SourceLocation where, std::vector<std::string> expected, const std::string& found)
    : Error(ErrorCode::SyntaxError, "expected " + join_expected(expected) + ", found " + found, where),
      expected_(std::move(expected)) {}

bool is_reserved(std::string_view word) {
  return std::any_of(kReserved.begin(), kReserved.end(), [&](std::string_view k) { return iequals(k, word); });
}

std::vector<Statement> parse(std::string_view text) { return Parser(text).script(); }

Predicate parse_predicate(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  return Parser(text).bare_predicate();
}

std::string_view to_string(Visibility v) {
  switch (v) {
    case Visibility::Closed: return "CLOSED";
    case Visibility::SemiOpen: return "SEMI-OPEN";
    case Visibility::Open: return "OPEN";
  }
  return "CLOSED";
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Lt: return "<";
    case CompareOp::Gt: return ">";
    case CompareOp::Le: return "<=";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

const std::string& atom_attribute(const Atom& atom) {
  return std::visit([](const auto& a) -> const std::string& { return a.attribute; }, atom);
}

std::vector<std::string> Predicate::attributes() const {
  std::vector<std::string> out;
  for (const auto& a : atoms) {
    const std::string& name = atom_attribute(a);
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

bool SelectQuery::has_aggregates() const {
  return std::any_of(items.begin(), items.end(), [](const SelectItem& i) { return std::holds_alternative<Aggregate>(i); });
}

std::vector<std::string> SelectQuery::referenced_attributes() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& n) {
    if (!n.empty() && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  for (const auto& item : items) {
    if (const auto* a = std::get_if<AttributeRef>(&item)) add(a->name);
    else add(std::get<Aggregate>(item).argument);
  }
  for (const auto& n : where.attributes()) add(n);
  for (const auto& g : group_by) add(g);
  return out;
}

std::string aggregate_label(const Aggregate& agg) {
  switch (agg.fn) {
    case AggregateFn::CountStar: return "COUNT(*)";
    case AggregateFn::Sum: return "SUM(" + agg.argument + ")";
    case AggregateFn::Avg: return "AVG(" + agg.argument + ")";
  }
  return "?";
}

}  // namespace ow::sql
