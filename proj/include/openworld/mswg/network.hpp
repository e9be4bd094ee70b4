#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "openworld/mswg/projections.hpp"

namespace ow::mswg {

struct SoftmaxBlock {
  std::size_t offset = 0;
  std::size_t width = 0;
  bool operator==(const SoftmaxBlock&) const = default;
};

struct NetSpec {
  std::size_t latent = 2;
  std::size_t output = 2;
  std::vector<std::size_t> hidden = {100, 100, 100};
  bool batch_norm = true;
  std::vector<SoftmaxBlock> softmax_blocks;
  bool operator==(const NetSpec&) const = default;
};

struct DenseLayer {
  std::size_t in = 0, out = 0;
  std::vector<double> w;  // in x out
  std::vector<double> b;
  std::vector<double> gw, gb;
  bool operator==(const DenseLayer& o) const { return in == o.in && out == o.out && w == o.w && b == o.b; }
};

struct BatchNormLayer {
  std::size_t dim = 0;
  std::vector<double> gamma, beta;
  std::vector<double> running_mean, running_var;
  std::vector<double> ggamma, gbeta;
  bool operator==(const BatchNormLayer& o) const {
    return dim == o.dim && gamma == o.gamma && beta == o.beta && running_mean == o.running_mean &&
           running_var == o.running_var;
  }
};

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

/// Feed-forward generator: hidden Linear -> [BatchNorm] -> ReLU layers, a
/// linear output, and a softmax over each categorical block.
class GeneratorNet {
 public:
  GeneratorNet() = default;
  GeneratorNet(NetSpec spec, Rng& rng);
  GeneratorNet(NetSpec spec, std::vector<DenseLayer> dense, std::vector<BatchNormLayer> norms);

  const NetSpec& spec() const { return spec_; }
  const std::vector<DenseLayer>& dense() const { return dense_; }
  const std::vector<BatchNormLayer>& norms() const { return norms_; }

  /// z is n x latent. Training mode uses batch statistics, updates the running
  /// ones, and caches activations for backward().
  const std::vector<double>& forward(std::span<const double> z, std::size_t n, bool training);
  /// Gradient of the loss w.r.t. the last forward output; overwrites the
  /// parameter gradients.
  void backward(std::span<const double> grad_out);

  std::size_t parameter_count() const;
  std::vector<std::span<double>> parameters();
  std::vector<std::span<double>> gradients();

  bool operator==(const GeneratorNet& o) const { return spec_ == o.spec_ && dense_ == o.dense_ && norms_ == o.norms_; }

 private:
  NetSpec spec_;
  std::vector<DenseLayer> dense_;
  std::vector<BatchNormLayer> norms_;

  std::size_t n_ = 0;
  std::vector<std::vector<double>> inputs_;  // input of each dense layer
  std::vector<std::vector<double>> xhat_;    // normalized pre-activations
  std::vector<std::vector<double>> pre_;     // pre-ReLU values
  std::vector<std::vector<double>> inv_std_;
  std::vector<double> output_;
};

class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(std::span<const std::span<double>> params, std::span<const std::span<double>> grads);
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace ow::mswg
