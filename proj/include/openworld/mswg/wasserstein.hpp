#pragma once

#include <span>
#include <vector>

namespace ow::mswg {

/// Exact 1-D Wasserstein-1 distance between two weighted point sets, both
/// normalized to probability measures. Empty weight spans mean uniform weights.
double wasserstein_1d(std::span<const double> p_values, std::span<const double> p_weights,
                      std::span<const double> q_values, std::span<const double> q_weights = {});

/// Subgradient of wasserstein_1d with respect to each q value, where Q carries
/// uniform weights 1/|Q|. The sorted coupling is held fixed.
std::vector<double> wasserstein_1d_grad(std::span<const double> p_values, std::span<const double> p_weights,
                                        std::span<const double> q_values);

/// Value and gradient in one pass.
double wasserstein_1d_with_grad(std::span<const double> p_values, std::span<const double> p_weights,
                                std::span<const double> q_values, std::span<double> grad);

}  // namespace ow::mswg
