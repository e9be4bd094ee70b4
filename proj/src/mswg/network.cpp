#include "openworld/mswg/network.hpp"

#include <algorithm>
#include <cmath>

#include "openworld/error.hpp"
#include "openworld/kernels.hpp"

namespace ow::mswg {

namespace {

DenseLayer make_dense(std::size_t in, std::size_t out, Rng& rng) {
  DenseLayer d;
  d.in = in;
  d.out = out;
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> u(-bound, bound);
  d.w.resize(in * out);
  for (auto& x : d.w) x = u(rng);
  d.b.resize(out);
  for (auto& x : d.b) x = u(rng);
  d.gw.assign(d.w.size(), 0.0);
  d.gb.assign(out, 0.0);
  return d;
}

BatchNormLayer make_norm(std::size_t dim) {
  BatchNormLayer b;
  b.dim = dim;
  b.gamma.assign(dim, 1.0);
  b.beta.assign(dim, 0.0);
  b.running_mean.assign(dim, 0.0);
  b.running_var.assign(dim, 1.0);
  b.ggamma.assign(dim, 0.0);
  b.gbeta.assign(dim, 0.0);
  return b;
}

void dense_forward(const DenseLayer& d, std::span<const double> x, std::size_t n, std::vector<double>& y) {
  y.resize(n * d.out);
  kernels::gemm(x, d.w, y, n, d.in, d.out);
  for (std::size_t r = 0; r < n; ++r) {
    double* row = y.data() + r * d.out;
    for (std::size_t j = 0; j < d.out; ++j) row[j] += d.b[j];
  }
}

// Accumulates parameter gradients and returns the input gradient in gx.
void dense_backward(DenseLayer& d, std::span<const double> x, std::span<const double> g, std::size_t n,
                    std::vector<double>* gx) {
  kernels::gemm_atb(x, g, d.gw, n, d.in, d.out);
  std::fill(d.gb.begin(), d.gb.end(), 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d.out; ++j) d.gb[j] += g[r * d.out + j];
  if (gx) {
    gx->resize(n * d.in);
    kernels::gemm_abt(g, d.w, *gx, n, d.out, d.in);
  }
}

}  // namespace

GeneratorNet::GeneratorNet(NetSpec spec, Rng& rng) : spec_(std::move(spec)) {
  if (spec_.latent == 0 || spec_.output == 0) fail(ErrorCode::ConfigError, "generator dimensions must be positive");
  std::size_t in = spec_.latent;
  for (std::size_t h : spec_.hidden) {
    if (h == 0) fail(ErrorCode::ConfigError, "hidden layer width must be positive");
    dense_.push_back(make_dense(in, h, rng));
    if (spec_.batch_norm) norms_.push_back(make_norm(h));
    in = h;
  }
  dense_.push_back(make_dense(in, spec_.output, rng));
  for (const auto& b : spec_.softmax_blocks)
    if (b.width == 0 || b.offset + b.width > spec_.output) fail(ErrorCode::ConfigError, "bad softmax block");
}

GeneratorNet::GeneratorNet(NetSpec spec, std::vector<DenseLayer> dense, std::vector<BatchNormLayer> norms)
    : spec_(std::move(spec)), dense_(std::move(dense)), norms_(std::move(norms)) {
  if (dense_.size() != spec_.hidden.size() + 1 || (spec_.batch_norm ? spec_.hidden.size() : 0) != norms_.size())
    fail(ErrorCode::FormatVersionMismatch, "generator layers do not match their spec");
  std::size_t in = spec_.latent;
  for (std::size_t i = 0; i < dense_.size(); ++i) {
    std::size_t out = i < spec_.hidden.size() ? spec_.hidden[i] : spec_.output;
    auto& d = dense_[i];
    if (d.in != in || d.out != out || d.w.size() != in * out || d.b.size() != out)
      fail(ErrorCode::FormatVersionMismatch, "generator layer shape mismatch");
    d.gw.assign(d.w.size(), 0.0);
    d.gb.assign(d.out, 0.0);
    in = out;
  }
  for (std::size_t i = 0; i < norms_.size(); ++i) {
    auto& b = norms_[i];
    if (b.dim != spec_.hidden[i] || b.gamma.size() != b.dim || b.beta.size() != b.dim ||
        b.running_mean.size() != b.dim || b.running_var.size() != b.dim)
      fail(ErrorCode::FormatVersionMismatch, "batch-norm layer shape mismatch");
    b.ggamma.assign(b.dim, 0.0);
    b.gbeta.assign(b.dim, 0.0);
  }
}

const std::vector<double>& GeneratorNet::forward(std::span<const double> z, std::size_t n, bool training) {
  if (z.size() != n * spec_.latent) fail(ErrorCode::Internal, "latent batch has the wrong size");
  const std::size_t nh = spec_.hidden.size();
  n_ = n;
  inputs_.resize(nh + 1);
  pre_.resize(nh);
  xhat_.resize(nh);
  inv_std_.resize(nh);
  inputs_[0].assign(z.begin(), z.end());
  std::vector<double> y;
  for (std::size_t l = 0; l < nh; ++l) {
    const std::size_t h = spec_.hidden[l];
    dense_forward(dense_[l], inputs_[l], n, y);
    if (spec_.batch_norm) {
      auto& bn = norms_[l];
      auto& xh = xhat_[l];
      auto& is = inv_std_[l];
      xh.resize(n * h);
      is.resize(h);
      for (std::size_t j = 0; j < h; ++j) {
        double mean, var;
        if (training) {
          double s = 0.0;
          for (std::size_t r = 0; r < n; ++r) s += y[r * h + j];
          mean = s / static_cast<double>(n);
          double ss = 0.0;
          for (std::size_t r = 0; r < n; ++r) {
            double dv = y[r * h + j] - mean;
            ss += dv * dv;
          }
          var = ss / static_cast<double>(n);
          double unbiased = n > 1 ? ss / static_cast<double>(n - 1) : var;
          bn.running_mean[j] = kBatchNormMomentum * bn.running_mean[j] + (1.0 - kBatchNormMomentum) * mean;
          bn.running_var[j] = kBatchNormMomentum * bn.running_var[j] + (1.0 - kBatchNormMomentum) * unbiased;
        } else {
          mean = bn.running_mean[j];
          var = bn.running_var[j];
        }
        is[j] = 1.0 / std::sqrt(var + kBatchNormEps);
        for (std::size_t r = 0; r < n; ++r) {
          double v = (y[r * h + j] - mean) * is[j];
          xh[r * h + j] = v;
          y[r * h + j] = bn.gamma[j] * v + bn.beta[j];
        }
      }
    }
    pre_[l] = y;
    auto& a = inputs_[l + 1];
    a.resize(n * h);
    for (std::size_t i = 0; i < n * h; ++i) a[i] = y[i] > 0.0 ? y[i] : 0.0;
  }
  dense_forward(dense_.back(), inputs_[nh], n, output_);
  const std::size_t d = spec_.output;
  for (const auto& blk : spec_.softmax_blocks) {
    for (std::size_t r = 0; r < n; ++r) {
      double* v = output_.data() + r * d + blk.offset;
      double mx = *std::max_element(v, v + blk.width);
      double s = 0.0;
      for (std::size_t k = 0; k < blk.width; ++k) {
        v[k] = std::exp(v[k] - mx);
        s += v[k];
      }
      for (std::size_t k = 0; k < blk.width; ++k) v[k] /= s;
    }
  }
  return output_;
}

void GeneratorNet::backward(std::span<const double> grad_out) {
  const std::size_t n = n_, d = spec_.output, nh = spec_.hidden.size();
  if (grad_out.size() != n * d || inputs_.size() != nh + 1) fail(ErrorCode::Internal, "backward without forward");
  std::vector<double> g(grad_out.begin(), grad_out.end());
  for (const auto& blk : spec_.softmax_blocks) {
    for (std::size_t r = 0; r < n; ++r) {
      const double* y = output_.data() + r * d + blk.offset;
      double* gv = g.data() + r * d + blk.offset;
      double dot = 0.0;
      for (std::size_t k = 0; k < blk.width; ++k) dot += gv[k] * y[k];
      for (std::size_t k = 0; k < blk.width; ++k) gv[k] = y[k] * (gv[k] - dot);
    }
  }
  std::vector<double> gx;
  dense_backward(dense_.back(), inputs_[nh], g, n, nh > 0 ? &gx : nullptr);
  for (std::size_t li = nh; li-- > 0;) {
    const std::size_t h = spec_.hidden[li];
    g.swap(gx);
    const auto& pre = pre_[li];
    for (std::size_t i = 0; i < n * h; ++i)
      if (!(pre[i] > 0.0)) g[i] = 0.0;
    if (spec_.batch_norm) {
      auto& bn = norms_[li];
      const auto& xh = xhat_[li];
      const auto& is = inv_std_[li];
      const double nn = static_cast<double>(n);
      for (std::size_t j = 0; j < h; ++j) {
        double sg = 0.0, sgx = 0.0, sdx = 0.0, sdxx = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          double gy = g[r * h + j];
          sg += gy;
          sgx += gy * xh[r * h + j];
        }
        bn.gbeta[j] = sg;
        bn.ggamma[j] = sgx;
        sdx = bn.gamma[j] * sg;
        sdxx = bn.gamma[j] * sgx;
        for (std::size_t r = 0; r < n; ++r) {
          double dxh = bn.gamma[j] * g[r * h + j];
          g[r * h + j] = is[j] / nn * (nn * dxh - sdx - xh[r * h + j] * sdxx);
        }
      }
    }
    dense_backward(dense_[li], inputs_[li], g, n, li > 0 ? &gx : nullptr);
  }
}

std::size_t GeneratorNet::parameter_count() const {
  std::size_t c = 0;
  for (const auto& d : dense_) c += d.w.size() + d.b.size();
  for (const auto& b : norms_) c += b.gamma.size() + b.beta.size();
  return c;
}

std::vector<std::span<double>> GeneratorNet::parameters() {
  std::vector<std::span<double>> p;
  for (auto& d : dense_) {
    p.emplace_back(d.w);
    p.emplace_back(d.b);
  }
  for (auto& b : norms_) {
    p.emplace_back(b.gamma);
    p.emplace_back(b.beta);
  }
  return p;
}

std::vector<std::span<double>> GeneratorNet::gradients() {
  std::vector<std::span<double>> g;
  for (auto& d : dense_) {
    g.emplace_back(d.gw);
    g.emplace_back(d.gb);
  }
  for (auto& b : norms_) {
    g.emplace_back(b.ggamma);
    g.emplace_back(b.gbeta);
  }
  return g;
}

void Adam::step(std::span<const std::span<double>> params, std::span<const std::span<double>> grads) {
  if (params.size() != grads.size()) fail(ErrorCode::Internal, "adam parameter/gradient mismatch");
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.size(), 0.0);
      v_.emplace_back(p.size(), 0.0);
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    auto g = grads[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
      double mh = m[k] / c1;
      double vh = v[k] / c2;
      p[k] -= lr_ * mh / (std::sqrt(vh) + eps_);
    }
  }
}

}  // namespace ow::mswg
