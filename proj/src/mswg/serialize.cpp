#include <fstream>
#include <sstream>

#include "../record_io.hpp"
#include "openworld/error.hpp"
#include "openworld/mswg/trainer.hpp"

namespace ow::mswg {

namespace {

using namespace detail;

constexpr std::string_view kMagic = "openworld-generator";
constexpr int kVersion = 1;

void write_values(std::ostringstream& o, const char* tag, const std::vector<double>& v) {
  o << tag << ' ' << v.size();
  for (double x : v) o << ' ' << num(x);
  o << '\n';
}

std::vector<double> read_values(Reader& rd, const char* tag) {
  auto t = rd.expect(tag, 2);
  std::size_t n = to_size(rd, t[1]);
  if (t.size() != n + 2) rd.bad(std::string("'") + tag + "' has the wrong number of values");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = to_num(rd, t[i + 2]);
  return v;
}

}  // namespace

std::string serialize_generator(const Generator& gen) {
  Writer w;
  auto& o = w.raw();
  o << kMagic << ' ' << kVersion << '\n';
  o << "config " << esc(gen.config.fingerprint()) << '\n';
  o << "population " << num(gen.population_size) << '\n';
  o << "best_loss " << num(gen.best_loss) << '\n';
  o << "encoding " << gen.encoding.attributes().size() << '\n';
  for (const auto& a : gen.encoding.attributes()) {
    o << "attr " << esc(a.name) << ' ';
    if (a.kind == AttributeKind::Numeric) {
      o << "numeric " << num(a.min) << ' ' << num(a.max) << ' ' << (a.integral ? 1 : 0) << '\n';
    } else {
      o << "categorical " << a.categories.size();
      for (const auto& c : a.categories) o << ' ' << esc(c);
      o << '\n';
    }
  }
  const NetSpec& s = gen.net.spec();
  o << "net " << s.latent << ' ' << s.output << ' ' << (s.batch_norm ? 1 : 0) << ' ' << s.hidden.size();
  for (auto h : s.hidden) o << ' ' << h;
  o << ' ' << s.softmax_blocks.size();
  for (const auto& b : s.softmax_blocks) o << ' ' << b.offset << ' ' << b.width;
  o << '\n';
  for (const auto& d : gen.net.dense()) {
    o << "dense " << d.in << ' ' << d.out << '\n';
    write_values(o, "w", d.w);
    write_values(o, "b", d.b);
  }
  for (const auto& n : gen.net.norms()) {
    o << "norm " << n.dim << '\n';
    write_values(o, "gamma", n.gamma);
    write_values(o, "beta", n.beta);
    write_values(o, "mean", n.running_mean);
    write_values(o, "var", n.running_var);
  }
  o << "history " << gen.history.size() << '\n';
  for (const auto& h : gen.history)
    o << "epoch " << h.epoch << ' ' << num(h.loss) << ' ' << num(h.train_loss) << ' ' << num(h.learning_rate) << '\n';
  o << "end\n";
  return w.str();
}

Generator deserialize_generator(std::string_view text) {
  Reader rd(text, "generator");
  auto head = rd.next();
  if (head.size() != 2 || head[0] != kMagic)
    fail(ErrorCode::FormatVersionMismatch, "not a generator file");
  if (head[1] != std::to_string(kVersion))
    fail(ErrorCode::FormatVersionMismatch, "generator format version " + head[1] + " is not supported (expected " +
                                               std::to_string(kVersion) + ")");
  Generator gen;
  auto cfg_line = rd.expect("config", 2);
  {
    KvConfig kv;
    std::istringstream is(unesc(rd, cfg_line[1]));
    std::string item;
    while (is >> item) {
      auto eq = item.find('=');
      if (eq == std::string::npos) rd.bad("bad config item '" + item + "'");
      kv.set(item.substr(0, eq), item.substr(eq + 1));
    }
    gen.config.apply(kv, "");
  }
  gen.population_size = to_num(rd, rd.expect("population", 2)[1]);
  gen.best_loss = to_num(rd, rd.expect("best_loss", 2)[1]);
  std::size_t na = to_size(rd, rd.expect("encoding", 2)[1]);
  std::vector<EncodedAttribute> attrs;
  for (std::size_t i = 0; i < na; ++i) {
    auto t = rd.expect("attr", 4);
    EncodedAttribute a;
    a.name = unesc(rd, t[1]);
    if (t[2] == "numeric") {
      if (t.size() != 6) rd.bad("bad numeric attr record");
      a.kind = AttributeKind::Numeric;
      a.min = to_num(rd, t[3]);
      a.max = to_num(rd, t[4]);
      a.integral = to_flag(rd, t[5]);
    } else if (t[2] == "categorical") {
      a.kind = AttributeKind::Categorical;
      std::size_t nc = to_size(rd, t[3]);
      if (t.size() != nc + 4) rd.bad("bad categorical attr record");
      for (std::size_t c = 0; c < nc; ++c) a.categories.push_back(unesc(rd, t[4 + c]));
    } else {
      rd.bad("unknown attribute kind '" + t[2] + "'");
    }
    attrs.push_back(std::move(a));
  }
  gen.encoding = Encoding(std::move(attrs));

  auto t = rd.expect("net", 5);
  NetSpec spec;
  spec.latent = to_size(rd, t[1]);
  spec.output = to_size(rd, t[2]);
  spec.batch_norm = to_flag(rd, t[3]);
  std::size_t nh = to_size(rd, t[4]);
  std::size_t pos = 5;
  if (t.size() < pos + nh + 1) rd.bad("bad net record");
  spec.hidden.clear();
  for (std::size_t i = 0; i < nh; ++i) spec.hidden.push_back(to_size(rd, t[pos++]));
  std::size_t nb = to_size(rd, t[pos++]);
  if (t.size() != pos + 2 * nb) rd.bad("bad net record");
  for (std::size_t i = 0; i < nb; ++i) {
    SoftmaxBlock b;
    b.offset = to_size(rd, t[pos++]);
    b.width = to_size(rd, t[pos++]);
    spec.softmax_blocks.push_back(b);
  }
  if (spec.output != gen.encoding.dim()) fail(ErrorCode::FormatVersionMismatch, "generator output does not match its encoding");
  std::vector<DenseLayer> dense;
  for (std::size_t i = 0; i <= nh; ++i) {
    auto d = rd.expect("dense", 3);
    DenseLayer l;
    l.in = to_size(rd, d[1]);
    l.out = to_size(rd, d[2]);
    l.w = read_values(rd, "w");
    l.b = read_values(rd, "b");
    dense.push_back(std::move(l));
  }
  std::vector<BatchNormLayer> norms;
  for (std::size_t i = 0; spec.batch_norm && i < nh; ++i) {
    auto d = rd.expect("norm", 2);
    BatchNormLayer b;
    b.dim = to_size(rd, d[1]);
    b.gamma = read_values(rd, "gamma");
    b.beta = read_values(rd, "beta");
    b.running_mean = read_values(rd, "mean");
    b.running_var = read_values(rd, "var");
    norms.push_back(std::move(b));
  }
  gen.net = GeneratorNet(spec, std::move(dense), std::move(norms));
  std::size_t nhist = to_size(rd, rd.expect("history", 2)[1]);
  for (std::size_t i = 0; i < nhist; ++i) {
    auto e = rd.expect("epoch", 5);
    gen.history.push_back({to_size(rd, e[1]), to_num(rd, e[2]), to_num(rd, e[3]), to_num(rd, e[4])});
  }
  rd.expect("end", 1);
  return gen;
}

void save_generator(const Generator& gen, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  out << serialize_generator(gen);
  if (!out) fail(ErrorCode::IoError, "error writing '" + path + "'");
}

Generator load_generator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_generator(ss.str());
}

}  // namespace ow::mswg
