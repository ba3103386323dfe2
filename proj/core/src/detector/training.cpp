#include "sxai/detector/training.hpp"

#include <cmath>
#include <numeric>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"
#include "sxai/core/random.hpp"

namespace sxai {

AdamOptimizer::AdamOptimizer(std::size_t n, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad, double learning_rate) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    fail(Errc::ShapeError, "optimizer state does not match parameter count");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
    params[k] -= learning_rate * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
}

void AdamOptimizer::save(BinaryWriter& out) const {
  out.put_f64(beta1_);
  out.put_f64(beta2_);
  out.put_f64(eps_);
  out.put_u64(t_);
  out.put_f64s(m_);
  out.put_f64s(v_);
}

AdamOptimizer AdamOptimizer::load(BinaryReader& in) {
  AdamOptimizer a;
  a.beta1_ = in.get_f64();
  a.beta2_ = in.get_f64();
  a.eps_ = in.get_f64();
  a.t_ = in.get_u64();
  a.m_ = in.get_f64s();
  a.v_ = in.get_f64s();
  if (a.m_.size() != a.v_.size()) fail(Errc::CorruptInput, "optimizer moment sizes differ");
  return a;
}

TrainResult ae_train(std::span<const WindowBatch> normals, const AeShape& shape,
                     const TrainConfig& config) {
  if (normals.size() < std::max<std::size_t>(config.min_train_windows, 1)) {
    fail(Errc::InsufficientData, "need at least " + std::to_string(config.min_train_windows) +
                                     " training windows, got " + std::to_string(normals.size()));
  }
  if (config.batch_size == 0) fail(Errc::ConfigError, "batch size must be positive");
  const auto steps = static_cast<Eigen::Index>(shape.steps);
  const auto features = static_cast<Eigen::Index>(shape.features);
  for (const auto& w : normals) {
    if (w.data.rows() != steps || w.data.cols() != features) {
      fail(Errc::ShapeError, "training window shape does not match the model");
    }
    if (!w.data.allFinite()) fail(Errc::InvalidValue, "non-finite value in training window");
  }

  // Per-channel z-score over every cell of every window.
  std::vector<double> mean(shape.features, 0.0), stddev(shape.features, 1.0);
  const double cells = static_cast<double>(normals.size()) * static_cast<double>(shape.steps);
  for (Eigen::Index j = 0; j < features; ++j) {
    double sum = 0.0;
    for (const auto& w : normals) sum += w.data.col(j).sum();
    const double mu = sum / cells;
    double ss = 0.0;
    for (const auto& w : normals) ss += (w.data.col(j).array() - mu).square().sum();
    const double sd = std::sqrt(ss / cells);
    mean[j] = mu;
    stddev[j] = sd > 1e-8 ? sd : 1.0;
  }

  TrainResult result;
  result.model = AEModel::create(shape, config.seed);
  result.model.set_normalization(mean, stddev);

  std::vector<Matrix> z;
  z.reserve(normals.size());
  for (const auto& w : normals) z.push_back(result.model.normalize(w.data));

  AdamOptimizer adam(result.model.param_count());
  std::vector<double> grad(result.model.param_count());
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        epoch_loss += result.model.loss_and_gradient(z[order[b]], grad);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      double norm2 = 0.0;
      for (auto& g : grad) {
        g *= scale;
        norm2 += g * g;
      }
      if (!std::isfinite(norm2)) fail(Errc::TrainingDiverged, "non-finite gradient");
      // Global-norm clipping keeps recurrent nets from exploding early on.
      const double norm = std::sqrt(norm2);
      if (norm > 5.0) {
        for (auto& g : grad) g *= 5.0 / norm;
      }
      adam.step(result.model.params(), grad, config.learning_rate);
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) fail(Errc::TrainingDiverged, "training loss became non-finite");
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

}  // namespace sxai
