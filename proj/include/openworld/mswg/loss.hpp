#pragma once

#include <span>
#include <vector>

#include "openworld/mswg/marginals.hpp"
#include "openworld/mswg/network.hpp"
#include "openworld/mswg/projections.hpp"

namespace ow::mswg {

/// Transport distance between one marginal target and the matching columns of
/// a generated batch (n x d). Unsliced when the marginal spans one encoded
/// column; otherwise the mean over `projections` of projected W1. Adds
/// scale * d(value)/d(batch) into grad when grad is non-null.
double transport_term(std::span<const double> batch, std::size_t n, std::size_t d, const PreparedMarginal& marginal,
                      const TransportTarget& target, const ProjectionSet* projections, double scale,
                      std::vector<double>* grad);

struct LossContext {
  const std::vector<PreparedMarginal>* marginals = nullptr;
  const std::vector<TransportTarget>* targets = nullptr;
  const std::vector<ProjectionSet>* projections = nullptr;  // per marginal; ignored when unsliced
  std::span<const double> sample;                           // encoded, sample_rows x d
  std::size_t sample_rows = 0;
  double lambda = 0.0;
  std::size_t coverage_subsample = 0;
  Rng* rng = nullptr;
};

struct LossBreakdown {
  double total = 0.0;
  double transport = 0.0;
  double coverage = 0.0;
  std::vector<double> per_marginal;
};

/// Loss of a generated batch; gradient w.r.t. the batch into grad if non-null.
LossBreakdown evaluate_loss(std::span<const double> batch, std::size_t n, std::size_t d, const LossContext& ctx,
                            std::vector<double>* grad);

/// Forward (training mode), loss, and backward; parameter gradients end up in net.
LossBreakdown loss_and_grad(GeneratorNet& net, std::span<const double> latents, std::size_t n,
                            const LossContext& ctx);

}  // namespace ow::mswg
