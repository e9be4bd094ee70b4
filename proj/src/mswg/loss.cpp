#include "openworld/mswg/loss.hpp"

#include <cmath>

#include "openworld/error.hpp"
#include "openworld/kernels.hpp"
#include "openworld/mswg/coverage.hpp"
#include "openworld/mswg/wasserstein.hpp"

namespace ow::mswg {

double transport_term(std::span<const double> batch, std::size_t n, std::size_t d, const PreparedMarginal& m,
                      const TransportTarget& target, const ProjectionSet* projections, double scale,
                      std::vector<double>* grad) {
  const std::size_t k = m.k();
  std::vector<double> q(n * k);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < k; ++j) q[r * k + j] = batch[r * d + m.dims[j]];

  if (k == 1) {
    std::vector<double> g(n);
    double w = wasserstein_1d_with_grad(target.points, target.weights, q, g);
    if (grad)
      for (std::size_t r = 0; r < n; ++r) (*grad)[r * d + m.dims[0]] += scale * g[r];
    return w;
  }

  if (!projections || projections->dim != k || projections->count == 0)
    fail(ErrorCode::Internal, "sliced marginal '" + m.name + "' needs projections of dimension " + std::to_string(k));
  const std::size_t np = projections->count;
  std::vector<double> qp(np * n), gq(np * n), values(np);
  kernels::gemm_abt(projections->directions, q, qp, np, k, n);

  if (target.weights.empty() && target.count == n) {
    std::vector<double> pp(np * n);
    kernels::gemm_abt(projections->directions, target.points, pp, np, k, n);
    kernels::sliced_w1(pp, qp, values, gq, np, n);
  } else {
    std::vector<double> pp(np * target.count);
    kernels::gemm_abt(projections->directions, target.points, pp, np, k, target.count);
    for (std::size_t j = 0; j < np; ++j)
      values[j] = wasserstein_1d_with_grad(std::span<const double>(pp.data() + j * target.count, target.count),
                                           target.weights, std::span<const double>(qp.data() + j * n, n),
                                           std::span<double>(gq.data() + j * n, n));
  }
  double w = 0.0;
  for (double v : values) w += v;
  w /= static_cast<double>(np);
  if (grad) {
    std::vector<double> dq(n * k);
    kernels::gemm_atb(gq, projections->directions, dq, np, n, k);
    const double s = scale / static_cast<double>(np);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < k; ++j) (*grad)[r * d + m.dims[j]] += s * dq[r * k + j];
  }
  return w;
}

LossBreakdown evaluate_loss(std::span<const double> batch, std::size_t n, std::size_t d, const LossContext& ctx,
                            std::vector<double>* grad) {
  if (!ctx.marginals || !ctx.targets || ctx.targets->size() != ctx.marginals->size())
    fail(ErrorCode::Internal, "loss context is incomplete");
  if (grad) grad->assign(n * d, 0.0);
  LossBreakdown out;
  for (std::size_t i = 0; i < ctx.marginals->size(); ++i) {
    const auto& m = (*ctx.marginals)[i];
    const ProjectionSet* proj = m.sliced() && ctx.projections ? &(*ctx.projections)[i] : nullptr;
    double w = transport_term(batch, n, d, m, (*ctx.targets)[i], proj, 1.0, grad);
    out.per_marginal.push_back(w);
    out.transport += w;
  }
  if (ctx.lambda > 0.0) {
    auto cov = coverage_penalty(batch, n, ctx.sample, ctx.sample_rows, d, ctx.coverage_subsample, ctx.rng);
    out.coverage = cov.value;
    if (grad)
      for (std::size_t i = 0; i < grad->size(); ++i) (*grad)[i] += ctx.lambda * cov.grad[i];
  }
  out.total = out.transport + ctx.lambda * out.coverage;
  if (!std::isfinite(out.total))
    fail(ErrorCode::NonFiniteLoss, "non-finite loss (transport " + format_number(out.transport) + ", coverage " +
                                       format_number(out.coverage) + ")");
  return out;
}

LossBreakdown loss_and_grad(GeneratorNet& net, std::span<const double> latents, std::size_t n,
                            const LossContext& ctx) {
  const auto& out = net.forward(latents, n, true);
  const std::size_t d = net.spec().output;
  std::vector<double> grad;
  LossBreakdown lb = evaluate_loss(out, n, d, ctx, &grad);
  for (double g : grad)
    if (!std::isfinite(g)) fail(ErrorCode::NonFiniteLoss, "non-finite gradient of the generator output");
  net.backward(grad);
  for (auto g : net.gradients())
    for (double v : g)
      if (!std::isfinite(v)) fail(ErrorCode::NonFiniteLoss, "non-finite parameter gradient");
  return lb;
}

}  // namespace ow::mswg
