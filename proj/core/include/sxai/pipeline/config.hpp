#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sxai/core/metrics.hpp"
#include "sxai/data/features.hpp"
#include "sxai/data/synth.hpp"
#include "sxai/detector/detector.hpp"
#include "sxai/detector/window.hpp"
#include "sxai/rules/amrules.hpp"

namespace sxai {

enum class ExecutionMode : std::uint8_t { Sequential = 0, Parallel = 1 };
enum class BackpressurePolicy : std::uint8_t { Block = 0, Shed = 1 };

struct WindowingConfig {
  WindowMode mode = WindowMode::Cycle;
  /// Fixed mode: records per window and records between window starts.
  std::size_t length = 600;
  std::size_t stride = 600;
  std::size_t max_cycle_length = 4096;

  friend bool operator==(const WindowingConfig&, const WindowingConfig&) = default;
};

struct SamplingConfig {
  bool enabled = true;
  std::uint64_t k_max = 10;

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

struct EvaluationConfig {
  std::size_t window = 1000;
  double t_phi = 0.8;
  PhiWeighting weighting = PhiWeighting::Thresholded;
  /// Examples between two points of the metric series.
  std::size_t stride = 1;

  friend bool operator==(const EvaluationConfig&, const EvaluationConfig&) = default;
};

struct OutputConfig {
  std::string alarms_log = "alarms.log";
  std::string explanations_log = "explanations.log";
  std::string report = "report.json";

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct PipelineConfig {
  DetectorConfig detector;
  WindowingConfig windowing;
  /// Leading windows used to train the detector and fit the feature scaler
  /// when no trained model is supplied.
  std::size_t train_windows = 150;
  FeatureConfig features;
  AMRulesConfig rules;
  SamplingConfig sampling;
  EvaluationConfig evaluation;
  ExecutionMode mode = ExecutionMode::Sequential;
  std::size_t queue_capacity = 64;
  BackpressurePolicy backpressure = BackpressurePolicy::Block;
  /// Write a local explanation for every window, not only alarms.
  bool explain_all = false;
  std::string data;
  OutputConfig output;
  std::optional<GeneratorConfig> generator;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Missing keys keep their defaults; unknown keys and wrong types throw
/// Errc::ConfigError.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& c);
PipelineConfig load_config(const std::string& path);

GeneratorConfig generator_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeneratorConfig& g);

}  // namespace sxai
