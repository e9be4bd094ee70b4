#include <charconv>
#include <fstream>
#include <sstream>

#include "openworld/catalog.hpp"
#include "openworld/error.hpp"
#include "openworld/parser.hpp"
#include "record_io.hpp"

namespace ow {

namespace {

using namespace detail;

constexpr std::string_view kMagic = "openworld-catalog";
constexpr int kVersion = 1;

void write_schema(Writer& w, const Schema& schema) {
  w.line({"schema", std::to_string(schema.size())});
  for (const auto& a : schema) {
    auto& o = w.raw();
    o << "attr " << esc(a.name) << ' ' << (a.is_numeric() ? "numeric" : "categorical") << ' ';
    if (a.range) o << "1 " << num(a.range->min) << ' ' << num(a.range->max);
    else o << "0";
    o << ' ' << a.domain.size();
    for (const auto& v : a.domain) o << ' ' << esc(v);
    o << '\n';
  }
}

void write_table(Writer& w, const Table& t) {
  write_schema(w, t.schema());
  w.line({"rows", std::to_string(t.rows())});
  auto& o = w.raw();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    o << 'r';
    for (std::size_t c = 0; c < t.cols(); ++c) o << ' ' << num(t.raw(r, c));
    o << '\n';
  }
}

std::string mechanism_tokens(const std::optional<sql::Mechanism>& m) {
  if (!m) return "none";
  if (m->kind == sql::MechanismKind::Uniform) return "uniform " + num(m->percent);
  return "stratified " + esc(m->strat_attribute) + " " + num(m->percent);
}

Schema read_schema(Reader& rd) {
  auto h = rd.expect("schema", 2);
  std::size_t n = to_size(rd, h[1]);
  Schema schema;
  for (std::size_t i = 0; i < n; ++i) {
    auto t = rd.expect("attr", 5);
    AttributeDef a;
    a.name = unesc(rd, t[1]);
    if (t[2] == "numeric") a.kind = AttributeKind::Numeric;
    else if (t[2] == "categorical") a.kind = AttributeKind::Categorical;
    else rd.bad("bad attribute kind");
    std::size_t k = 3;
    if (to_flag(rd, t[k++])) {
      if (t.size() < 7) rd.bad("short attr record");
      a.range = NumericRange{to_num(rd, t[k]), to_num(rd, t[k + 1])};
      k += 2;
    }
    std::size_t nd = to_size(rd, t[k++]);
    if (t.size() != k + nd) rd.bad("attr domain length mismatch");
    for (std::size_t d = 0; d < nd; ++d) a.domain.push_back(unesc(rd, t[k + d]));
    schema.push_back(std::move(a));
  }
  return schema;
}

Table read_table(Reader& rd) {
  Table t(read_schema(rd));
  auto h = rd.expect("rows", 2);
  std::size_t n = to_size(rd, h[1]);
  t.reserve(n);
  std::vector<double> raw(t.cols());
  for (std::size_t r = 0; r < n; ++r) {
    auto toks = rd.expect("r", 1);
    if (toks.size() != t.cols() + 1) rd.bad("row width mismatch");
    for (std::size_t c = 0; c < t.cols(); ++c) raw[c] = to_num(rd, toks[c + 1]);
    t.append_raw(raw);
  }
  return t;
}

sql::Predicate read_predicate(const Reader& rd, const std::string& tok) {
  std::string text = unesc(rd, tok);
  try {
    return sql::parse_predicate(text);
  } catch (const Error& e) {
    rd.bad(std::string("bad predicate: ") + e.what());
  }
}

}  // namespace

std::string serialize_catalog(const CatalogState& st) {
  Writer w;
  w.line({std::string(kMagic), std::to_string(kVersion)});
  w.line({"seed", std::to_string(st.seed)});
  w.line({"populations", std::to_string(st.populations.size())});
  for (const auto& p : st.populations) {
    w.line({"population", esc(p.name), p.is_global ? "1" : "0", esc(p.source), p.schema_declared ? "1" : "0",
            esc(sql::render_predicate(p.predicate))});
    write_schema(w, p.schema);
  }
  w.line({"tables", std::to_string(st.tables.size())});
  for (const auto& t : st.tables) {
    w.line({"table", esc(t.name), t.temporary ? "1" : "0", t.schema_declared ? "1" : "0"});
    write_table(w, t.data);
  }
  w.line({"samples", std::to_string(st.samples.size())});
  for (const auto& s : st.samples) {
    w.line({"sample", esc(s.name), esc(s.source), s.schema_declared ? "1" : "0", esc(sql::render_predicate(s.predicate)),
            mechanism_tokens(s.mechanism)});
    auto& o = w.raw();
    o << "columns " << s.view_columns.size();
    for (const auto& c : s.view_columns) o << ' ' << esc(c);
    o << '\n';
    write_table(w, s.data);
    o << "weights " << s.weights.size();
    for (double x : s.weights) o << ' ' << num(x);
    o << '\n';
  }
  w.line({"marginals", std::to_string(st.marginals.size())});
  for (const auto& m : st.marginals) {
    w.line({"marginal", esc(m.name), esc(m.owner), std::to_string(m.attributes.size())});
    auto& o = w.raw();
    for (std::size_t i = 0; i < m.attributes.size(); ++i) {
      o << "mattr " << esc(m.attributes[i]) << ' ' << (m.kinds[i] == AttributeKind::Numeric ? "numeric" : "categorical");
      if (m.binning[i]) o << " 1 " << num(m.binning[i]->min) << ' ' << num(m.binning[i]->max) << ' ' << m.binning[i]->bins;
      else o << " 0";
      o << '\n';
    }
    o << "cells " << m.cells.size() << '\n';
    for (const auto& c : m.cells) {
      o << 'c';
      for (std::size_t i = 0; i < c.key.size(); ++i) {
        if (const double* d = std::get_if<double>(&c.key[i])) o << " n" << num(*d);
        else o << " s" << esc(std::get<std::string>(c.key[i]));
      }
      o << ' ' << num(c.count) << '\n';
    }
  }
  w.line({"end"});
  return w.str();
}

CatalogState deserialize_catalog(std::string_view text) {
  Reader rd(text, "catalog");
  if (rd.done()) fail(ErrorCode::FormatVersionMismatch, "empty catalog file");
  auto head = rd.next();
  if (head.size() != 2 || head[0] != kMagic)
    fail(ErrorCode::FormatVersionMismatch, "not a catalog file");
  if (head[1] != std::to_string(kVersion))
    fail(ErrorCode::FormatVersionMismatch, "unsupported catalog version " + head[1]);
  CatalogState st;
  {
    auto t = rd.expect("seed", 2);
    auto res = std::from_chars(t[1].data(), t[1].data() + t[1].size(), st.seed);
    if (res.ec != std::errc{}) rd.bad("bad seed");
  }
  std::size_t np = to_size(rd, rd.expect("populations", 2)[1]);
  for (std::size_t i = 0; i < np; ++i) {
    auto t = rd.expect("population", 6);
    PopulationDef p;
    p.name = unesc(rd, t[1]);
    p.is_global = to_flag(rd, t[2]);
    p.source = unesc(rd, t[3]);
    p.schema_declared = to_flag(rd, t[4]);
    p.predicate = read_predicate(rd, t[5]);
    p.schema = read_schema(rd);
    st.populations.push_back(std::move(p));
  }
  std::size_t nt = to_size(rd, rd.expect("tables", 2)[1]);
  for (std::size_t i = 0; i < nt; ++i) {
    auto t = rd.expect("table", 4);
    AuxTable a;
    a.name = unesc(rd, t[1]);
    a.temporary = to_flag(rd, t[2]);
    a.schema_declared = to_flag(rd, t[3]);
    a.data = read_table(rd);
    st.tables.push_back(std::move(a));
  }
  std::size_t ns = to_size(rd, rd.expect("samples", 2)[1]);
  for (std::size_t i = 0; i < ns; ++i) {
    auto t = rd.expect("sample", 6);
    SampleRelation s;
    s.name = unesc(rd, t[1]);
    s.source = unesc(rd, t[2]);
    s.schema_declared = to_flag(rd, t[3]);
    s.predicate = read_predicate(rd, t[4]);
    if (t[5] == "uniform") {
      if (t.size() != 7) rd.bad("bad mechanism");
      s.mechanism = sql::Mechanism{sql::MechanismKind::Uniform, {}, to_num(rd, t[6])};
    } else if (t[5] == "stratified") {
      if (t.size() != 8) rd.bad("bad mechanism");
      s.mechanism = sql::Mechanism{sql::MechanismKind::Stratified, unesc(rd, t[6]), to_num(rd, t[7])};
    } else if (t[5] != "none" || t.size() != 6) {
      rd.bad("bad mechanism");
    }
    auto cols = rd.expect("columns", 2);
    std::size_t nc = to_size(rd, cols[1]);
    if (cols.size() != nc + 2) rd.bad("columns length mismatch");
    for (std::size_t c = 0; c < nc; ++c) s.view_columns.push_back(unesc(rd, cols[c + 2]));
    s.data = read_table(rd);
    auto w = rd.expect("weights", 2);
    std::size_t nw = to_size(rd, w[1]);
    if (w.size() != nw + 2) rd.bad("weights length mismatch");
    for (std::size_t k = 0; k < nw; ++k) s.weights.push_back(to_num(rd, w[k + 2]));
    st.samples.push_back(std::move(s));
  }
  std::size_t nm = to_size(rd, rd.expect("marginals", 2)[1]);
  for (std::size_t i = 0; i < nm; ++i) {
    auto t = rd.expect("marginal", 4);
    Marginal m;
    m.name = unesc(rd, t[1]);
    m.owner = unesc(rd, t[2]);
    std::size_t na = to_size(rd, t[3]);
    for (std::size_t a = 0; a < na; ++a) {
      auto at = rd.expect("mattr", 4);
      m.attributes.push_back(unesc(rd, at[1]));
      if (at[2] == "numeric") m.kinds.push_back(AttributeKind::Numeric);
      else if (at[2] == "categorical") m.kinds.push_back(AttributeKind::Categorical);
      else rd.bad("bad marginal attribute kind");
      if (to_flag(rd, at[3])) {
        if (at.size() != 7) rd.bad("bad binning");
        m.binning.push_back(Binning{to_num(rd, at[4]), to_num(rd, at[5]), static_cast<int>(to_size(rd, at[6]))});
      } else {
        m.binning.emplace_back();
      }
    }
    std::size_t nc = to_size(rd, rd.expect("cells", 2)[1]);
    for (std::size_t c = 0; c < nc; ++c) {
      auto ct = rd.expect("c", 2);
      if (ct.size() != na + 2) rd.bad("cell width mismatch");
      MarginalCell cell;
      for (std::size_t a = 0; a < na; ++a) {
        const std::string& k = ct[a + 1];
        if (k.empty()) rd.bad("empty cell key");
        if (k[0] == 'n') cell.key.emplace_back(to_num(rd, k.substr(1)));
        else if (k[0] == 's') cell.key.emplace_back(unesc(rd, std::string_view(k).substr(1)));
        else rd.bad("bad cell key");
      }
      cell.count = to_num(rd, ct.back());
      m.cells.push_back(std::move(cell));
    }
    st.marginals.push_back(std::move(m));
  }
  rd.expect("end", 1);
  return st;
}

void Catalog::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write catalog '" + path + "'");
  out << serialize_catalog(state_);
  if (!out) fail(ErrorCode::IoError, "failed writing catalog '" + path + "'");
}

Catalog Catalog::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open catalog '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return Catalog(deserialize_catalog(ss.str()));
}

}  // namespace ow
