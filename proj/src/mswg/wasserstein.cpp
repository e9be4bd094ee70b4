#include "openworld/mswg/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "openworld/error.hpp"

namespace ow::mswg {

namespace {

struct Measure {
  std::vector<std::size_t> order;
  std::vector<double> mass;  // normalized, in sorted order
};

Measure prepare(std::span<const double> values, std::span<const double> weights, const char* which) {
  if (values.empty()) fail(ErrorCode::EmptyDistribution, std::string(which) + " distribution is empty");
  if (!weights.empty() && weights.size() != values.size())
    fail(ErrorCode::Internal, std::string(which) + " weights/values size mismatch");
  Measure m;
  m.order.resize(values.size());
  std::iota(m.order.begin(), m.order.end(), std::size_t{0});
  std::stable_sort(m.order.begin(), m.order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = 0.0;
  if (weights.empty()) {
    total = static_cast<double>(values.size());
  } else {
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        fail(ErrorCode::EmptyDistribution, std::string(which) + " has a negative or non-finite weight");
      total += w;
    }
  }
  if (!(total > 0.0)) fail(ErrorCode::EmptyDistribution, std::string(which) + " has zero total weight");
  m.mass.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    m.mass[i] = (weights.empty() ? 1.0 : weights[m.order[i]]) / total;
  return m;
}

// Walks the monotone coupling; calls f(p_sorted_index, q_sorted_index, mass).
template <class F>
void couple(const Measure& p, const Measure& q, F&& f) {
  std::size_t i = 0, j = 0;
  double ri = p.mass[0], rj = q.mass[0];
  const std::size_t n = p.mass.size(), m = q.mass.size();
  while (i < n && j < m) {
    double mu = std::min(ri, rj);
    if (mu > 0.0) f(i, j, mu);
    ri -= mu;
    rj -= mu;
    if (ri <= 0.0) {
      if (++i < n) ri = p.mass[i];
    }
    if (rj <= 0.0) {
      if (++j < m) rj = q.mass[j];
    }
  }
}

}  // namespace

double wasserstein_1d(std::span<const double> p_values, std::span<const double> p_weights,
                      std::span<const double> q_values, std::span<const double> q_weights) {
  Measure p = prepare(p_values, p_weights, "P");
  Measure q = prepare(q_values, q_weights, "Q");
  double w = 0.0;
  couple(p, q, [&](std::size_t i, std::size_t j, double mu) {
    w += mu * std::abs(p_values[p.order[i]] - q_values[q.order[j]]);
  });
  return w;
}

double wasserstein_1d_with_grad(std::span<const double> p_values, std::span<const double> p_weights,
                                std::span<const double> q_values, std::span<double> grad) {
  Measure p = prepare(p_values, p_weights, "P");
  Measure q = prepare(q_values, {}, "Q");
  std::fill(grad.begin(), grad.end(), 0.0);
  double w = 0.0;
  couple(p, q, [&](std::size_t i, std::size_t j, double mu) {
    double diff = q_values[q.order[j]] - p_values[p.order[i]];
    w += mu * std::abs(diff);
    if (diff > 0.0) grad[q.order[j]] += mu;
    else if (diff < 0.0) grad[q.order[j]] -= mu;
  });
  return w;
}

std::vector<double> wasserstein_1d_grad(std::span<const double> p_values, std::span<const double> p_weights,
                                        std::span<const double> q_values) {
  std::vector<double> g(q_values.size());
  wasserstein_1d_with_grad(p_values, p_weights, q_values, g);
  return g;
}

}  // namespace ow::mswg
