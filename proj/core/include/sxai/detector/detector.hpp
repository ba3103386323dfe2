#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sxai/detector/autoencoder.hpp"
#include "sxai/detector/training.hpp"

namespace sxai {

class BinaryWriter;
class BinaryReader;

/// thr_re = q3 + 3 * iqr of `train_re`. Throws Errc::InsufficientData for
/// fewer than 4 values.
double threshold_init(std::span<const double> train_re, double iqr_factor = 3.0);

/// Adaptive alarm threshold maintained over a bounded FIFO of errors from
/// windows labelled normal.
class AlarmThreshold {
 public:
  AlarmThreshold() = default;
  AlarmThreshold(std::span<const double> train_re, std::size_t capacity = 1000,
                 double iqr_factor = 3.0);

  double value() const noexcept { return thr_; }
  const std::deque<double>& history() const noexcept { return history_; }
  std::size_t capacity() const noexcept { return capacity_; }

  /// Abnormal windows never move the threshold.
  void update(double re, bool is_normal);

  void save(BinaryWriter& out) const;
  static AlarmThreshold load(BinaryReader& in);

  friend bool operator==(const AlarmThreshold&, const AlarmThreshold&) = default;

 private:
  void recompute();

  std::deque<double> history_;
  std::size_t capacity_ = 1000;
  double iqr_factor_ = 3.0;
  double thr_ = 0.0;
};

/// Exponential moving average; the first sample passes through unchanged.
class LowPassFilter {
 public:
  explicit LowPassFilter(double alpha = 0.3);

  double apply(double re);
  double alpha() const noexcept { return alpha_; }
  std::optional<double> state() const noexcept { return state_; }

  void save(BinaryWriter& out) const;
  static LowPassFilter load(BinaryReader& in);

  friend bool operator==(const LowPassFilter&, const LowPassFilter&) = default;

 private:
  double alpha_;
  std::optional<double> state_;
};

struct Alarm {
  std::uint64_t window_id = 0;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  double raw_re = 0.0;
  double filtered_re = 0.0;
  double thr_re = 0.0;
  /// Consecutive abnormal windows ending at this one.
  std::uint32_t run_length = 0;
};

/// Requires `k` consecutive abnormal windows before alarming, then alarms on
/// every further abnormal window of the episode.
class PersistenceGate {
 public:
  explicit PersistenceGate(std::uint32_t k = 2);

  /// Returns whether the window is abnormal; `alarm` is set when the gate fires.
  bool decide(double filtered_re, double thr_re, bool& alarm);

  std::uint32_t consecutive() const noexcept { return consecutive_; }
  std::uint32_t persistence() const noexcept { return k_; }

  void save(BinaryWriter& out) const;
  static PersistenceGate load(BinaryReader& in);

  friend bool operator==(const PersistenceGate&, const PersistenceGate&) = default;

 private:
  std::uint32_t k_;
  std::uint32_t consecutive_ = 0;
};

/// Which per-window error is thresholded and handed downstream.
enum class ErrorTarget : std::uint8_t { RmsRe = 0, MeanSquare = 1 };

struct DetectorConfig {
  AeShape shape;
  TrainConfig train;
  double iqr_factor = 3.0;
  std::size_t history_capacity = 1000;
  double filter_alpha = 0.3;
  std::uint32_t persistence = 2;
  ErrorTarget target = ErrorTarget::RmsRe;
  /// One Adam step per normal window at learning_rate * fine_tune_scale.
  bool fine_tune = false;
  double fine_tune_scale = 0.1;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

struct Detection {
  std::uint64_t window_id = 0;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  double re = 0.0;
  double rms_re = 0.0;
  /// The thresholded quantity (rms_re or re, per config).
  double score = 0.0;
  double filtered = 0.0;
  /// Threshold used to label this window (value before its own update).
  double thr_re = 0.0;
  bool abnormal = false;
  std::optional<Alarm> alarm;
};

/// The detection layer as a single-writer state machine: reconstruct, filter,
/// label against the previous threshold, gate on persistence, then let normal
/// windows update the threshold.
class Detector {
 public:
  Detector(AEModel model, AlarmThreshold threshold, const DetectorConfig& config);

  Detection process(const WindowBatch& window);

  const AEModel& model() const noexcept { return model_; }
  const AlarmThreshold& threshold() const noexcept { return threshold_; }
  const LowPassFilter& filter() const noexcept { return filter_; }
  const PersistenceGate& gate() const noexcept { return gate_; }
  const DetectorConfig& config() const noexcept { return config_; }

  void save(BinaryWriter& out) const;
  static Detector load(BinaryReader& in, const DetectorConfig& config);

  friend bool operator==(const Detector& a, const Detector& b) {
    return a.model_ == b.model_ && a.threshold_ == b.threshold_ && a.filter_ == b.filter_ &&
           a.gate_ == b.gate_ && a.adam_ == b.adam_;
  }

 private:
  AEModel model_;
  AlarmThreshold threshold_;
  LowPassFilter filter_;
  PersistenceGate gate_;
  DetectorConfig config_;
  AdamOptimizer adam_;
};

/// Named normalization vectors stored alongside the model (used by the
/// explainer's feature scaler).
struct AuxNormalization {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> stddev;
  friend bool operator==(const AuxNormalization&, const AuxNormalization&) = default;
};

/// Contents of an "SXAE" model checkpoint.
struct ModelBundle {
  AEModel model;
  AlarmThreshold threshold;
  AuxNormalization features;
  /// JSON text of the configuration used for training.
  std::string config_echo;
  friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path);

}  // namespace sxai
