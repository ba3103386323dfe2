#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sxai/detector/autoencoder.hpp"

namespace sxai {

class BinaryWriter;
class BinaryReader;

/// Adam update rule over a flat parameter vector.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  explicit AdamOptimizer(std::size_t n, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grad, double learning_rate);

  std::uint64_t steps() const noexcept { return t_; }

  void save(BinaryWriter& out) const;
  static AdamOptimizer load(BinaryReader& in);

  friend bool operator==(const AdamOptimizer&, const AdamOptimizer&) = default;

 private:
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 16;
  double learning_rate = 2e-3;
  std::uint64_t seed = 7;
  std::size_t min_train_windows = 8;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainResult {
  AEModel model;
  /// Mean training loss of each epoch.
  std::vector<double> epoch_loss;
};

/// Fits per-channel normalization on `normals`, then minimizes the mean
/// squared reconstruction error with mini-batch Adam. Deterministic for a
/// given seed. Throws Errc::InsufficientData and Errc::TrainingDiverged.
TrainResult ae_train(std::span<const WindowBatch> normals, const AeShape& shape,
                     const TrainConfig& config);

}  // namespace sxai
