#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "doctest.h"
#include "openworld/error.hpp"
#include "openworld/mswg/loss.hpp"
#include "openworld/mswg/marginals.hpp"
#include "oracles/oracles.hpp"

using namespace ow;
using namespace ow::mswg;

namespace {

Table numeric_table(const std::vector<std::array<double, 2>>& rows) {
  Table t({AttributeDef{"x", AttributeKind::Numeric, {}, {}}, AttributeDef{"y", AttributeKind::Numeric, {}, {}}});
  for (const auto& r : rows) {
    std::vector<Value> v{r[0], r[1]};
    t.append_row(v);
  }
  return t;
}

Marginal marginal_2d(const std::vector<std::pair<std::array<double, 2>, double>>& cells) {
  Marginal m{"mxy", "P", {"x", "y"}, {AttributeKind::Numeric, AttributeKind::Numeric}, {std::nullopt, std::nullopt}, {}};
  for (const auto& [k, c] : cells) m.cells.push_back({{k[0], k[1]}, c});
  return m;
}

Marginal marginal_1d(const std::string& attr, const std::vector<std::pair<double, double>>& cells) {
  Marginal m{"m" + attr, "P", {attr}, {AttributeKind::Numeric}, {std::nullopt}, {}};
  for (const auto& [k, c] : cells) m.cells.push_back({{k}, c});
  return m;
}

/// A two-marginal problem over encoded (x, y): a sliced joint and a 1-D x marginal.
struct Problem {
  Table sample;
  std::vector<Marginal> raw;
  Encoding enc;
  std::vector<PreparedMarginal> prepared;
  std::vector<TransportTarget> targets;
  std::vector<ProjectionSet> projections;
  std::vector<double> encoded;

  explicit Problem(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(0, 9);
    std::vector<std::array<double, 2>> rows;
    for (int i = 0; i < 15; ++i) rows.push_back({double(d(rng)), double(d(rng))});
    sample = numeric_table(rows);
    std::vector<std::pair<std::array<double, 2>, double>> joint;
    for (int i = 0; i < 6; ++i) joint.push_back({{double(d(rng)), double(d(rng))}, 1.0 + d(rng)});
    raw = {marginal_2d(joint), marginal_1d("x", {{0.0, 3.0}, {4.0, 2.0}, {9.0, 5.0}})};
    enc = Encoding::build(sample, raw);
    Rng prng(seed);
    for (const auto& m : raw) {
      prepared.push_back(prepare_marginal(m, enc));
      targets.push_back(exact_target(prepared.back()));
      projections.push_back(prepared.back().sliced() ? sample_projections(7, prepared.back().k(), prng) : ProjectionSet{});
    }
    encoded = enc.encode(sample);
  }

  LossContext context(double lambda) const {
    LossContext ctx;
    ctx.marginals = &prepared;
    ctx.targets = &targets;
    ctx.projections = &projections;
    ctx.sample = encoded;
    ctx.sample_rows = sample.rows();
    ctx.lambda = lambda;
    return ctx;
  }
};

std::vector<double> uniform_batch(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  std::vector<double> b(n * d);
  for (auto& x : b) x = u(rng);
  return b;
}

}  // namespace

TEST_CASE("transport terms match their one-dimensional and projected definitions") {
  Problem p(1);
  std::mt19937_64 rng(2);
  const std::size_t n = 9, d = p.enc.dim();
  auto batch = uniform_batch(n, d, rng);

  // Unsliced: W1 of the x column against the weighted target.
  std::vector<double> xs;
  for (std::size_t r = 0; r < n; ++r) xs.push_back(batch[r * d + p.prepared[1].dims[0]]);
  std::vector<double> tx(p.targets[1].points);
  double lp = oracle::transport_lp(tx, p.targets[1].weights, xs, {});
  CHECK(transport_term(batch, n, d, p.prepared[1], p.targets[1], nullptr, 1.0, nullptr) == doctest::Approx(lp));

  // Sliced: mean over the projections of the projected LP.
  const auto& proj = p.projections[0];
  double mean = 0;
  for (std::size_t j = 0; j < proj.count; ++j) {
    auto w = proj.direction(j);
    std::vector<double> pb, pt;
    for (std::size_t r = 0; r < n; ++r) pb.push_back(w[0] * batch[r * d + p.prepared[0].dims[0]] + w[1] * batch[r * d + p.prepared[0].dims[1]]);
    for (std::size_t c = 0; c < p.prepared[0].cells(); ++c)
      pt.push_back(w[0] * p.targets[0].points[c * 2] + w[1] * p.targets[0].points[c * 2 + 1]);
    mean += oracle::transport_lp(pt, p.targets[0].weights, pb, {}) / static_cast<double>(proj.count);
  }
  CHECK(transport_term(batch, n, d, p.prepared[0], p.targets[0], &proj, 1.0, nullptr) == doctest::Approx(mean));
  CHECK_THROWS_AS(transport_term(batch, n, d, p.prepared[0], p.targets[0], nullptr, 1.0, nullptr), Error);
}

TEST_CASE("loss gradient w.r.t. the batch matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Problem p(seed);
    std::mt19937_64 rng(seed + 100);
    const std::size_t n = 8, d = p.enc.dim();
    auto batch = uniform_batch(n, d, rng);
    auto ctx = p.context(0.3);
    std::vector<double> grad;
    auto lb = evaluate_loss(batch, n, d, ctx, &grad);
    CHECK(lb.total == doctest::Approx(lb.transport + 0.3 * lb.coverage));
    CHECK(lb.per_marginal.size() == 2);
    auto f = [&](const std::vector<double>& x) { return evaluate_loss(x, n, d, ctx, nullptr).total; };
    CHECK(oracle::max_relative_error(grad, oracle::central_gradient(f, batch, 1e-7), 1e-3) < 1e-4);
  }
}

TEST_CASE("full loss gradient through a two-layer generator") {
  Problem p(3);
  Rng rng(5);
  GeneratorNet net(NetSpec{2, p.enc.dim(), {6, 5}, true, {}}, rng);
  const std::size_t n = 10;
  std::normal_distribution<double> normal;
  std::vector<double> z(n * 2);
  for (auto& x : z) x = normal(rng);
  auto ctx = p.context(0.1);
  loss_and_grad(net, z, n, ctx);
  std::vector<double> analytic, numeric;
  auto params = net.parameters();
  auto grads = net.gradients();
  auto value = [&] { return evaluate_loss(net.forward(z, n, true), n, p.enc.dim(), ctx, nullptr).total; };
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
  CHECK(oracle::max_relative_error(analytic, numeric, 1e-3) < 1e-3);
}

TEST_CASE("a batch equal to the target has zero transport loss") {
  Problem p(4);
  // Four equal-mass points, reproduced exactly by the batch.
  Marginal m = marginal_2d({{{1, 2}, 1}, {{3, 3}, 1}, {{7, 0}, 1}, {{9, 9}, 1}});
  PreparedMarginal pm = prepare_marginal(m, p.enc);
  std::vector<PreparedMarginal> ms = {pm};
  std::vector<TransportTarget> ts = {TransportTarget{pm.points, {}, pm.cells()}};
  Rng prng(1);
  std::vector<ProjectionSet> ps = {sample_projections(25, 2, prng)};
  const std::size_t d = p.enc.dim(), n = pm.cells();
  std::vector<double> batch(n * d, 0.5);
  // Rows in reverse cell order.
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < 2; ++j) batch[r * d + pm.dims[j]] = pm.points[(n - 1 - r) * 2 + j];
  LossContext ctx;
  ctx.marginals = &ms;
  ctx.targets = &ts;
  ctx.projections = &ps;
  ctx.lambda = 0.0;
  CHECK(std::abs(evaluate_loss(batch, n, d, ctx, nullptr).total) < 1e-12);
}

TEST_CASE("the loss does not depend on batch row order") {
  Problem p(6);
  std::mt19937_64 rng(7);
  const std::size_t n = 12, d = p.enc.dim();
  auto batch = uniform_batch(n, d, rng);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> shuffled(n * d);
  for (std::size_t r = 0; r < n; ++r) std::copy_n(batch.begin() + perm[r] * d, d, shuffled.begin() + r * d);
  auto ctx = p.context(0.5);
  std::vector<double> g1, g2;
  double a = evaluate_loss(batch, n, d, ctx, &g1).total;
  double b = evaluate_loss(shuffled, n, d, ctx, &g2).total;
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) CHECK(g2[r * d + j] == doctest::Approx(g1[perm[r] * d + j]).epsilon(1e-12));
}

TEST_CASE("augment_marginals covers every sample attribute") {
  Table s({AttributeDef{"country", AttributeKind::Categorical, {}, {}},
           AttributeDef{"email", AttributeKind::Categorical, {}, {}}});
  for (auto [c, e] : {std::pair{"UK", "Yahoo"}, {"UK", "Yahoo"}, {"FR", "Gmail"}, {"FR", "Yahoo"}}) {
    std::vector<Value> r{std::string(c), std::string(e)};
    s.append_row(r);
  }
  Marginal mc{"mc", "P", {"country"}, {AttributeKind::Categorical}, {std::nullopt},
              {{{std::string("UK")}, 600}, {{std::string("FR")}, 400}}};
  Marginal mz{"mz", "P", {"age"}, {AttributeKind::Numeric}, {std::nullopt}, {{{30.0}, 1000}}};
  auto out = augment_marginals({mc, mz}, s);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == mc);
  CHECK(out[1].attributes == std::vector<std::string>{"email"});
  CHECK(out[1].total() == doctest::Approx(1000));
  for (const auto& c : out[1].cells) {
    if (std::get<std::string>(c.key[0]) == "Yahoo") CHECK(c.count == doctest::Approx(750));
    if (std::get<std::string>(c.key[0]) == "Gmail") CHECK(c.count == doctest::Approx(250));
  }
  CHECK_THROWS_AS(augment_marginals({}, s), Error);
}

TEST_CASE("resampled targets follow the cell distribution") {
  Problem p(8);
  Rng rng(3);
  const auto& m = p.prepared[1];
  auto t = resample_target(m, 20000, rng);
  CHECK(t.count == 20000);
  CHECK(t.weights.empty());
  std::vector<double> freq(m.cells(), 0.0);
  for (std::size_t i = 0; i < t.count; ++i)
    for (std::size_t c = 0; c < m.cells(); ++c)
      if (t.points[i] == m.points[c]) freq[c] += 1.0 / 20000;
  for (std::size_t c = 0; c < m.cells(); ++c) CHECK(freq[c] == doctest::Approx(m.mass[c]).epsilon(0.05));
}
