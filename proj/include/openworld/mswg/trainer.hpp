#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "openworld/catalog.hpp"
#include "openworld/kv_config.hpp"
#include "openworld/mswg/encoding.hpp"
#include "openworld/mswg/network.hpp"

namespace ow::mswg {

struct TrainConfig {
  double lambda = 0.04;
  std::size_t latent_dim = 0;  // 0 = encoded dimensionality
  std::size_t projections = 100;
  std::size_t batch_size = 500;
  std::size_t epochs = 10;
  double learning_rate = 1e-3;
  double plateau_factor = 0.1;
  std::size_t plateau_patience = 5;
  double plateau_min_improvement = 1e-4;
  std::uint64_t seed = 42;
  std::vector<std::size_t> hidden_layers = {100, 100, 100};
  bool batch_norm = true;
  std::size_t coverage_subsample = 2048;
  std::size_t steps_per_epoch = 0;  // 0 = ceil(N_pop / batch_size)

  void validate() const;
  /// Reads `mswg.*` keys (or bare keys when prefix is empty) over the current values.
  void apply(const KvConfig& cfg, const std::string& prefix = "mswg.");
  /// Stable textual form, used for cache keys and serialization.
  std::string fingerprint() const;

  static TrainConfig spiral();
  static TrainConfig flights();
  bool operator==(const TrainConfig&) const = default;
};

struct EpochLog {
  std::size_t epoch = 0;
  /// Loss of a fixed latent batch against the exact marginals (inference-mode
  /// net); drives plateau detection and best-net selection.
  double loss = 0.0;
  /// Mean minibatch loss over the epoch.
  double train_loss = 0.0;
  double learning_rate = 0.0;
};

inline constexpr std::size_t kMonitorBatch = 4096;

struct Generator {
  Encoding encoding;
  GeneratorNet net;
  TrainConfig config;
  double population_size = 0.0;
  double best_loss = 0.0;
  std::vector<EpochLog> history;
};

using ProgressFn = std::function<void(const EpochLog&)>;

/// Trains on `marginals`, which must already cover every sample attribute
/// (see augment_marginals). Returns the net with the best epoch loss.
Generator train(const Table& sample, const std::vector<Marginal>& marginals, const TrainConfig& cfg,
                const ProgressFn& progress = {});

/// n rows decoded from fresh latents; batch norm in inference mode.
Table generate(const Generator& gen, std::size_t n, Rng& rng);

void save_generator(const Generator& gen, const std::string& path);
Generator load_generator(const std::string& path);
std::string serialize_generator(const Generator& gen);
Generator deserialize_generator(std::string_view text);

}  // namespace ow::mswg
