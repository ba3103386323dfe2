#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sxai/core/metrics.hpp"
#include "sxai/data/cycles.hpp"
#include "sxai/data/features.hpp"
#include "sxai/detector/detector.hpp"
#include "sxai/explain/explain.hpp"
#include "sxai/pipeline/config.hpp"
#include "sxai/rules/amrules.hpp"
#include "sxai/sampling/chebyshev.hpp"

namespace sxai {

/// A detector window with its scaled features: the unit handed from the
/// detection layer to the explanation layer.
struct WindowResult {
  std::uint64_t window_id = 0;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  std::vector<double> features;
  Detection detection;
};

/// Resamples the 16 sensor channels of a record span to `steps` rows.
WindowBatch make_window(std::span<const RawRecord> records, std::size_t steps, std::uint64_t id);

/// Record spans (cycles or fixed windows) as configured.
class Segmenter {
 public:
  explicit Segmenter(const WindowingConfig& config);

  std::optional<Cycle> push(const RawRecord& record);
  void finish();

  std::size_t partial_dropped() const noexcept;

  void save(BinaryWriter& out) const;
  static Segmenter load(BinaryReader& in, const WindowingConfig& config);
  friend bool operator==(const Segmenter&, const Segmenter&) = default;

 private:
  WindowingConfig config_;
  CycleSegmenter cycles_;
  std::deque<RawRecord> buffer_;
  std::size_t since_emit_ = 0;
  std::uint64_t next_index_ = 0;
  std::size_t fixed_dropped_ = 0;
};

struct TrainingOutcome {
  ModelBundle bundle;
  /// Records consumed by training; online processing starts after them.
  std::size_t consumed = 0;
  std::vector<double> epoch_loss;
};

/// Trains the detector on the first `train_windows` windows, initializes
/// the threshold from their scores and fits the feature scaler on them.
/// Throws Errc::InsufficientData when the records hold too few windows.
TrainingOutcome train_detector(std::span<const RawRecord> records, const PipelineConfig& config);

/// Detection layer: segmentation, features, autoencoder and alarm logic.
class DetectionStage {
 public:
  DetectionStage(const PipelineConfig& config, const ModelBundle& bundle);

  std::optional<WindowResult> push(const RawRecord& record);
  void finish() { segmenter_.finish(); }

  const Detector& detector() const noexcept { return detector_; }
  const FeatureSchema& schema() const noexcept { return schema_; }
  std::uint64_t windows() const noexcept { return windows_; }

  void save(BinaryWriter& out) const;
  static DetectionStage load(BinaryReader& in, const PipelineConfig& config);
  friend bool operator==(const DetectionStage& a, const DetectionStage& b) {
    return a.detector_ == b.detector_ && a.scaler_ == b.scaler_ && a.segmenter_ == b.segmenter_ &&
           a.windows_ == b.windows_;
  }

 private:
  DetectionStage(const PipelineConfig& config, Detector detector, FeatureScaler scaler, Segmenter segmenter);

  PipelineConfig config_;
  FeatureSchema schema_;
  Detector detector_;
  FeatureScaler scaler_;
  Segmenter segmenter_;
  std::uint64_t windows_ = 0;
};

struct MetricPoint {
  std::uint64_t step = 0;
  double rmse = 0.0;
  std::optional<double> rmse_phi;
  friend bool operator==(const MetricPoint&, const MetricPoint&) = default;
};

struct VariantReport {
  std::string name;
  bool sampling = false;
  std::uint64_t examples = 0;
  std::uint64_t presentations = 0;
  std::uint64_t capped = 0;
  std::vector<MetricPoint> series;
  double rmse = 0.0;
  std::optional<double> rmse_phi;
  double seconds = 0.0;
  std::size_t peak_memory_bytes = 0;
  double relative_time = 1.0;
  double relative_memory = 1.0;
  std::size_t rules = 0;
  std::size_t rules_above = 0;
  double fraction_above = 0.0;
  double thr_re = 0.0;
  nlohmann::json rule_set;
};

struct EvalReport {
  std::uint64_t records = 0;
  std::uint64_t windows = 0;
  std::uint64_t alarms = 0;
  std::uint64_t alarm_episodes = 0;
  std::uint64_t dropped = 0;
  std::vector<VariantReport> variants;
};

nlohmann::json to_json(const MetricPoint& p);
nlohmann::json to_json(const VariantReport& v);
nlohmann::json to_json(const EvalReport& r);

/// Explanation layer: prequential test-then-train of the rule learner on
/// (features, score) pairs and local explanations for alarms.
class ExplanationStage {
 public:
  struct Output {
    std::optional<std::string> alarm_line;
    std::optional<std::string> explanation_line;
  };

  ExplanationStage(const PipelineConfig& config, std::vector<std::string> feature_names,
                   std::string name = "");

  Output consume(const WindowResult& w);
  /// Series, aggregates and rule statistics; timing and memory fields are
  /// left to the caller.
  VariantReport report() const;

  const AMRules& learner() const noexcept { return learner_; }
  std::size_t peak_memory() const noexcept { return peak_memory_; }

  void save(BinaryWriter& out) const;
  static ExplanationStage load(BinaryReader& in, const PipelineConfig& config);
  friend bool operator==(const ExplanationStage& a, const ExplanationStage& b) {
    return a.learner_ == b.learner_ && a.sampler_ == b.sampler_ && a.window_ == b.window_ &&
           a.series_ == b.series_ && a.examples_ == b.examples_ && a.thr_re_ == b.thr_re_ &&
           a.name_ == b.name_ && a.in_episode_ == b.in_episode_ && a.alarms_ == b.alarms_ &&
           a.episodes_ == b.episodes_ && a.peak_memory_ == b.peak_memory_;
  }

  std::uint64_t alarms() const noexcept { return alarms_; }
  std::uint64_t episodes() const noexcept { return episodes_; }

 private:
  PipelineConfig config_;
  std::string name_;
  AMRules learner_;
  ChebyshevOversampler sampler_;
  MetricWindow window_;
  std::vector<MetricPoint> series_;
  std::uint64_t examples_ = 0;
  double thr_re_ = 0.0;
  std::size_t peak_memory_ = 0;
  bool in_episode_ = false;
  std::uint64_t alarms_ = 0;
  std::uint64_t episodes_ = 0;
};

/// Both layers chained in one thread. Supports checkpoint and resume.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, const ModelBundle& bundle);

  void set_output(std::ostream* alarms, std::ostream* explanations);
  void push(const RawRecord& record);
  void finish();
  EvalReport report() const;

  const PipelineConfig& config() const noexcept { return config_; }
  const DetectionStage& detection() const noexcept { return detection_; }
  const ExplanationStage& explanation() const noexcept { return explanation_; }

  void save_checkpoint(const std::string& path) const;
  /// Throws Errc::VersionError or Errc::ChecksumError for incompatible files.
  static Pipeline load_checkpoint(const std::string& path);

  friend bool operator==(const Pipeline& a, const Pipeline& b) {
    return a.config_ == b.config_ && a.detection_ == b.detection_ && a.explanation_ == b.explanation_ &&
           a.records_ == b.records_;
  }

 private:
  Pipeline(PipelineConfig config, DetectionStage detection, ExplanationStage explanation);
  void emit(const ExplanationStage::Output& out);

  PipelineConfig config_;
  DetectionStage detection_;
  ExplanationStage explanation_;
  std::uint64_t records_ = 0;
  std::ostream* alarms_out_ = nullptr;
  std::ostream* explanations_out_ = nullptr;
};

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct RunResult {
  std::string alarms_log;
  std::string explanations_log;
  EvalReport report;
  /// Set when inline training ran.
  std::optional<TrainingOutcome> training;
};

/// Runs both layers over `records` in the configured execution mode. Without
/// a bundle the detector is trained inline on the leading windows, which are
/// then skipped.
RunResult run_online(std::span<const RawRecord> records, const PipelineConfig& config,
                     const std::optional<ModelBundle>& bundle = std::nullopt);

/// Runs the detection layer once, then each variant's explanation layer
/// over the same window stream. Known variant names: "amrules" (no
/// sampling) and "chebyos" (Chebyshev over-sampling). Relative time and
/// memory are against the first variant.
EvalReport evaluate_prequential(std::span<const RawRecord> records, const PipelineConfig& config,
                                const std::vector<std::string>& variants,
                                const std::optional<ModelBundle>& bundle = std::nullopt);

}  // namespace sxai
