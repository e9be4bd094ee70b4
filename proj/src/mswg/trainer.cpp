#include "openworld/mswg/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <algorithm>
#include <sstream>

#include "openworld/error.hpp"
#include "openworld/mswg/loss.hpp"
#include "openworld/mswg/marginals.hpp"

namespace ow::mswg {

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorCode::ConfigError, "lambda must be >= 0");
  if (projections < 1) fail(ErrorCode::ConfigError, "projections must be >= 1");
  if (batch_size < 2) fail(ErrorCode::ConfigError, "batch_size must be >= 2");
  if (!(learning_rate > 0.0)) fail(ErrorCode::ConfigError, "learning_rate must be > 0");
  if (!(plateau_factor > 0.0 && plateau_factor <= 1.0)) fail(ErrorCode::ConfigError, "plateau_factor must be in (0,1]");
  if (plateau_patience < 1) fail(ErrorCode::ConfigError, "plateau_patience must be >= 1");
  if (plateau_min_improvement < 0.0) fail(ErrorCode::ConfigError, "plateau_min_improvement must be >= 0");
  for (auto h : hidden_layers)
    if (h == 0) fail(ErrorCode::ConfigError, "hidden layer sizes must be positive");
}

void TrainConfig::apply(const KvConfig& cfg, const std::string& prefix) {
  auto key = [&](const char* k) { return prefix + k; };
  lambda = cfg.get_double(key("lambda"), lambda);
  latent_dim = static_cast<std::size_t>(cfg.get_u64(key("latent_dim"), latent_dim));
  projections = static_cast<std::size_t>(cfg.get_u64(key("projections"), projections));
  batch_size = static_cast<std::size_t>(cfg.get_u64(key("batch_size"), batch_size));
  epochs = static_cast<std::size_t>(cfg.get_u64(key("epochs"), epochs));
  learning_rate = cfg.get_double(key("learning_rate"), learning_rate);
  plateau_factor = cfg.get_double(key("plateau_factor"), plateau_factor);
  plateau_patience = static_cast<std::size_t>(cfg.get_u64(key("plateau_patience"), plateau_patience));
  plateau_min_improvement = cfg.get_double(key("plateau_min_improvement"), plateau_min_improvement);
  seed = cfg.get_u64(key("seed"), seed);
  if (cfg.get(key("hidden_layers"))) {
    hidden_layers.clear();
    for (auto v : cfg.get_ints(key("hidden_layers"), {})) {
      if (v <= 0) fail(ErrorCode::ConfigError, "hidden layer sizes must be positive");
      hidden_layers.push_back(static_cast<std::size_t>(v));
    }
  }
  batch_norm = cfg.get_bool(key("batch_norm"), batch_norm);
  coverage_subsample = static_cast<std::size_t>(cfg.get_u64(key("coverage_subsample"), coverage_subsample));
  steps_per_epoch = static_cast<std::size_t>(cfg.get_u64(key("steps_per_epoch"), steps_per_epoch));
  validate();
}

std::string TrainConfig::fingerprint() const {
  std::ostringstream os;
  os << "lambda=" << format_number(lambda) << " latent_dim=" << latent_dim << " projections=" << projections
     << " batch_size=" << batch_size << " epochs=" << epochs << " learning_rate=" << format_number(learning_rate)
     << " plateau_factor=" << format_number(plateau_factor) << " plateau_patience=" << plateau_patience
     << " plateau_min_improvement=" << format_number(plateau_min_improvement) << " seed=" << seed
     << " hidden_layers=";
  for (std::size_t i = 0; i < hidden_layers.size(); ++i) os << (i ? "," : "") << hidden_layers[i];
  os << " batch_norm=" << (batch_norm ? 1 : 0) << " coverage_subsample=" << coverage_subsample
     << " steps_per_epoch=" << steps_per_epoch;
  return os.str();
}

TrainConfig TrainConfig::spiral() {
  TrainConfig c;
  c.lambda = 0.04;
  c.latent_dim = 2;
  c.batch_size = 500;
  c.learning_rate = 1e-3;
  c.hidden_layers = {100, 100, 100};
  c.batch_norm = true;
  return c;
}

TrainConfig TrainConfig::flights() {
  TrainConfig c;
  c.lambda = 1e-7;
  c.projections = 1000;
  c.hidden_layers = {50, 50, 50, 50, 50};
  c.batch_norm = true;
  return c;
}

namespace {

std::vector<double> latents(std::size_t n, std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(n * dim);
  for (auto& v : z) v = normal(rng);
  return z;
}

NetSpec net_spec(const Encoding& enc, const TrainConfig& cfg) {
  NetSpec spec;
  spec.latent = cfg.latent_dim ? cfg.latent_dim : enc.dim();
  spec.output = enc.dim();
  spec.hidden = cfg.hidden_layers;
  spec.batch_norm = cfg.batch_norm;
  for (const auto& a : enc.attributes())
    if (a.kind == AttributeKind::Categorical) spec.softmax_blocks.push_back({a.offset, a.width});
  return spec;
}

}  // namespace

Generator train(const Table& sample, const std::vector<Marginal>& marginals, const TrainConfig& cfg,
                const ProgressFn& progress) {
  cfg.validate();
  if (sample.rows() == 0) fail(ErrorCode::EmptySample, "cannot train on an empty sample");
  if (marginals.empty()) fail(ErrorCode::NoPopulationMarginals, "training needs population marginals");
  for (const auto& def : sample.schema()) {
    bool covered = false;
    for (const auto& m : marginals)
      for (const auto& a : m.attributes) covered = covered || a == def.name;
    if (!covered) fail(ErrorCode::ConfigError, "attribute '" + def.name + "' is not covered by any marginal");
  }

  Rng rng(cfg.seed);
  Generator gen;
  gen.config = cfg;
  gen.encoding = Encoding::build(sample, marginals);
  gen.population_size = marginals.front().total();
  gen.net = GeneratorNet(net_spec(gen.encoding, cfg), rng);
  if (cfg.epochs == 0) return gen;

  std::vector<PreparedMarginal> prepared;
  for (const auto& m : marginals) prepared.push_back(prepare_marginal(m, gen.encoding));
  const std::vector<double> encoded = gen.encoding.encode(sample);
  const std::size_t n = cfg.batch_size, ell = gen.net.spec().latent;
  const std::size_t steps = cfg.steps_per_epoch
                                ? cfg.steps_per_epoch
                                : static_cast<std::size_t>(std::ceil(gen.population_size / static_cast<double>(n)));

  std::vector<TransportTarget> targets(prepared.size());
  std::vector<ProjectionSet> projections(prepared.size());
  LossContext ctx;
  ctx.marginals = &prepared;
  ctx.targets = &targets;
  ctx.projections = &projections;
  ctx.sample = encoded;
  ctx.sample_rows = sample.rows();
  ctx.lambda = cfg.lambda;
  ctx.coverage_subsample = cfg.coverage_subsample;
  ctx.rng = &rng;

  // Fixed monitoring problem: exact marginals, fixed projections and latents,
  // and a fixed coverage subsample.
  Rng mrng(cfg.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<TransportTarget> mtargets;
  std::vector<ProjectionSet> mprojections(prepared.size());
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    mtargets.push_back(exact_target(prepared[i]));
    if (prepared[i].sliced()) mprojections[i] = sample_projections(cfg.projections, prepared[i].k(), mrng);
  }
  const std::size_t d = gen.encoding.dim();
  std::vector<double> msample;
  std::size_t mrows = sample.rows();
  if (cfg.coverage_subsample > 0 && mrows > cfg.coverage_subsample) {
    std::vector<std::size_t> idx(mrows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), mrng);
    idx.resize(cfg.coverage_subsample);
    std::sort(idx.begin(), idx.end());
    for (auto r : idx) msample.insert(msample.end(), encoded.begin() + static_cast<std::ptrdiff_t>(r * d),
                                      encoded.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
    mrows = idx.size();
  } else {
    msample = encoded;
  }
  LossContext mctx = ctx;
  mctx.targets = &mtargets;
  mctx.projections = &mprojections;
  mctx.sample = msample;
  mctx.sample_rows = mrows;
  mctx.coverage_subsample = 0;
  mctx.rng = nullptr;
  const std::vector<double> mz = latents(kMonitorBatch, ell, mrng);
  auto monitor = [&](GeneratorNet& net) {
    GeneratorNet probe = net;
    const auto& out = probe.forward(mz, kMonitorBatch, false);
    return evaluate_loss(out, kMonitorBatch, d, mctx, nullptr).total;
  };

  Adam adam(cfg.learning_rate);
  GeneratorNet best = gen.net;
  double best_loss = std::numeric_limits<double>::infinity();
  double plateau_ref = best_loss;
  std::size_t stale = 0;
  auto params = gen.net.parameters();
  auto grads = gen.net.gradients();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double sum = 0.0;
    for (std::size_t s = 0; s < std::max<std::size_t>(steps, 1); ++s) {
      for (std::size_t i = 0; i < prepared.size(); ++i) {
        targets[i] = resample_target(prepared[i], n, rng);
        if (prepared[i].sliced()) projections[i] = sample_projections(cfg.projections, prepared[i].k(), rng);
      }
      auto z = latents(n, ell, rng);
      LossBreakdown lb = loss_and_grad(gen.net, z, n, ctx);
      adam.step(params, grads);
      sum += lb.total;
    }
    EpochLog log{epoch, monitor(gen.net), sum / static_cast<double>(std::max<std::size_t>(steps, 1)),
                 adam.learning_rate()};
    if (!std::isfinite(log.loss)) fail(ErrorCode::NonFiniteLoss, "non-finite epoch loss at epoch " + std::to_string(epoch));
    gen.history.push_back(log);
    if (progress) progress(log);
    if (log.loss < best_loss) {
      best_loss = log.loss;
      best = gen.net;
    }
    if (log.loss < plateau_ref * (1.0 - cfg.plateau_min_improvement)) {
      plateau_ref = log.loss;
      stale = 0;
    } else if (++stale >= cfg.plateau_patience) {
      adam.set_learning_rate(adam.learning_rate() * cfg.plateau_factor);
      stale = 0;
    }
  }
  gen.net = std::move(best);
  gen.best_loss = best_loss;
  return gen;
}

Table generate(const Generator& gen, std::size_t n, Rng& rng) {
  if (n == 0) return Table(gen.encoding.schema());
  GeneratorNet net = gen.net;
  const std::size_t chunk = 4096, ell = net.spec().latent, d = gen.encoding.dim();
  std::vector<double> out;
  out.reserve(n * d);
  for (std::size_t done = 0; done < n; done += chunk) {
    std::size_t m = std::min(chunk, n - done);
    auto z = latents(m, ell, rng);
    const auto& y = net.forward(z, m, false);
    out.insert(out.end(), y.begin(), y.end());
  }
  return gen.encoding.decode(out, n);
}

}  // namespace ow::mswg
