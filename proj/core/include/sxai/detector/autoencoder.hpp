#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sxai/detector/window.hpp"

namespace sxai {

class BinaryWriter;
class BinaryReader;

enum class Architecture : std::uint8_t { Lstm = 0, Dense = 1 };

std::string_view to_string(Architecture a) noexcept;
Architecture architecture_from_string(std::string_view s);

/// Network geometry. `encoder` lists the hidden sizes down to the latent
/// dimension (its last entry); the decoder mirrors it.
struct AeShape {
  Architecture arch = Architecture::Lstm;
  std::size_t steps = 60;
  std::size_t features = 16;
  std::vector<std::size_t> encoder{32, 16};

  std::size_t latent() const { return encoder.back(); }
  friend bool operator==(const AeShape&, const AeShape&) = default;
};

struct Reconstruction {
  /// Reconstruction in normalized units, steps x features.
  Matrix output;
  /// Mean squared error over all cells (normalized units).
  double re = 0.0;
  /// Square root of re.
  double rms_re = 0.0;
};

/// Autoencoder parameters plus the per-channel normalization fitted on the
/// training set. Parameters live in one flat vector; layers view into it.
///
/// Lstm: stacked encoder LSTMs, last hidden state repeated over every step,
/// mirrored decoder LSTMs, and one dense projection applied at each step.
/// Dense: the flattened window through tanh layers [encoder..., mirror...]
/// and a linear output.
class AEModel {
 public:
  AEModel() = default;

  /// Glorot-uniform weights, zero biases (LSTM forget gates biased to 1).
  static AEModel create(const AeShape& shape, std::uint64_t seed);

  const AeShape& shape() const noexcept { return shape_; }
  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  std::size_t param_count() const noexcept { return params_.size(); }

  const std::vector<double>& norm_mean() const noexcept { return norm_mean_; }
  const std::vector<double>& norm_std() const noexcept { return norm_std_; }
  void set_normalization(std::vector<double> mean, std::vector<double> stddev);

  /// Applies the stored per-channel z-score.
  Matrix normalize(const Matrix& raw) const;

  /// Forward pass on normalized input.
  Matrix forward(const Matrix& z) const;

  /// Mean squared reconstruction error on normalized input; adds d(loss)/d(params)
  /// into `grad` (which must have param_count() entries).
  double loss_and_gradient(const Matrix& z, std::span<double> grad) const;

  /// Normalizes `w.data`, runs the network and scores it. Throws
  /// Errc::ShapeError when the window does not match the model.
  Reconstruction reconstruct(const WindowBatch& w) const;

  void save(BinaryWriter& out) const;
  static AEModel load(BinaryReader& in);

  friend bool operator==(const AEModel&, const AEModel&) = default;

 private:
  struct DenseLayer {
    std::size_t in = 0, out = 0, offset = 0;
    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
  };
  struct LstmLayer {
    std::size_t in = 0, hidden = 0, offset = 0;
    friend bool operator==(const LstmLayer&, const LstmLayer&) = default;
  };

  void layout();
  Matrix forward_dense(const Matrix& z) const;
  Matrix forward_lstm(const Matrix& z) const;
  double grad_dense(const Matrix& z, std::span<double> grad) const;
  double grad_lstm(const Matrix& z, std::span<double> grad) const;

  AeShape shape_;
  std::vector<double> params_;
  std::vector<double> norm_mean_;
  std::vector<double> norm_std_;
  std::vector<DenseLayer> dense_;
  std::vector<LstmLayer> lstm_;
  DenseLayer projection_;
};

/// Squared reconstruction error of one window in normalized units.
double reconstruction_error(const Matrix& z, const Matrix& z_hat);

/// sqrt(mean(squared_errors)). Throws Errc::EmptyInput.
double rms_re(std::span<const double> squared_errors);

}  // namespace sxai
