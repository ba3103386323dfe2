#pragma once

#include <cstdint>
#include <limits>

namespace sxai {

class BinaryWriter;
class BinaryReader;

enum class DriftStatus : std::uint8_t { Normal, Warning, Drift };

struct DdmConfig {
  /// Samples observed before any status other than Normal is reported.
  std::uint64_t warmup = 30;
  double warning_level = 2.0;
  double drift_level = 3.0;
  friend bool operator==(const DdmConfig&, const DdmConfig&) = default;
};

/// Drift detection on a binary error stream: tracks the error rate p and
/// s = sqrt(p (1 - p) / t) against their historical minimum.
class Ddm {
 public:
  explicit Ddm(DdmConfig config = {}) : config_(config) {}

  /// Resets itself after signalling Drift.
  DriftStatus update(bool error);
  void reset();

  std::uint64_t t() const noexcept { return t_; }
  double p() const noexcept { return p_; }
  double s() const noexcept { return s_; }
  double p_min() const noexcept { return p_min_; }
  double s_min() const noexcept { return s_min_; }
  DriftStatus status() const noexcept { return status_; }

  void save(BinaryWriter& out) const;
  static Ddm load(BinaryReader& in);

  friend bool operator==(const Ddm&, const Ddm&) = default;

 private:
  DdmConfig config_;
  std::uint64_t t_ = 0;
  double p_ = 0.0;
  double s_ = 0.0;
  double p_min_ = std::numeric_limits<double>::infinity();
  double s_min_ = std::numeric_limits<double>::infinity();
  DriftStatus status_ = DriftStatus::Normal;
};

}  // namespace sxai
