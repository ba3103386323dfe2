#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sxai/core/stats.hpp"
#include "sxai/data/cycles.hpp"

namespace sxai {

struct FeatureConfig {
  std::size_t charge_bins = 2;
  std::size_t empty_bins = 5;
  /// Trailing sample counts of the two oil-temperature moving averages.
  std::size_t ma_short = 30;
  std::size_t ma_long = 120;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// Names and source sensors of the per-cycle feature vector.
///
/// Layout: bins per binned sensor (B1_TP2 .. B7_MC), ones-counts per digital
/// (Ones_COMP ..), Min/Max of Oil, DV, Res, T_run, T_idle, then MA1_Oil,
/// MA2_Oil and Med_DV.
class FeatureSchema {
 public:
  explicit FeatureSchema(const FeatureConfig& config = {});

  const std::vector<std::string>& names() const noexcept { return names_; }
  /// Raw sensor column each feature is computed from.
  const std::vector<std::string>& sensors() const noexcept { return sensors_; }
  std::size_t size() const noexcept { return names_.size(); }
  /// Throws Errc::MissingFeature.
  std::size_t index_of(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::string> sensors_;
};

struct CycleFeatures {
  std::vector<double> values;
  /// A phase had no samples and its bins hold the boundary value.
  bool degenerate_phase = false;
};

/// Throws Errc::EmptyInput for an empty cycle.
CycleFeatures extract_features(const Cycle& cycle, const FeatureConfig& config = {});

/// Mean over [floor(j L / m), floor((j + 1) L / m)), widened to one sample.
std::vector<double> bin_means(std::span<const double> values, std::size_t bins);

void write_features_csv(std::ostream& out, const FeatureSchema& schema, std::span<const Cycle> cycles,
                        const FeatureConfig& config = {});

/// Per-feature z-scoring against running statistics that freeze once
/// `warmup` vectors have been observed.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(std::size_t features, std::size_t warmup);
  static FeatureScaler frozen(std::vector<double> mean, std::vector<double> stddev);

  void observe(std::span<const double> x);
  std::vector<double> transform(std::span<const double> x) const;
  void freeze();

  bool is_frozen() const noexcept { return frozen_; }
  std::size_t size() const noexcept { return stats_.size(); }
  std::vector<double> mean() const;
  std::vector<double> stddev() const;

  void save(BinaryWriter& out) const;
  static FeatureScaler load(BinaryReader& in);

  friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;

 private:
  std::vector<StreamStats> stats_;
  std::size_t warmup_ = 0;
  bool frozen_ = false;
  std::vector<double> mean_;
  std::vector<double> std_;
};

}  // namespace sxai
