#pragma once

#include <concepts>
#include <cstdint>
#include <span>

#include "sxai/core/stats.hpp"

namespace sxai {

class BinaryWriter;
class BinaryReader;

/// Chebyshev bound 1 / t^2 on how often a value lies t standard deviations
/// from the mean, t = |y - mean| / sigma. Returns 1 when t <= 1, when sigma
/// is zero, or before two values have been seen.
double frequency_score(double y, const StreamStats& stats);

/// Replication count max(1, ceil(|y - mean| / sigma)); 1 when sigma is zero
/// or fewer than two values have been seen.
std::uint64_t cheby_k(double y, const StreamStats& stats);

template <class R>
concept OnlineRegressor = requires(R& r, std::span<const double> x, double y) {
  r.learn_one(x, y);
};

struct OversampleReport {
  /// Number of times the example was presented.
  std::uint64_t k = 1;
  std::uint64_t k_uncapped = 1;
  bool capped = false;
};

/// Over-sampling wrapper: presents each example K times to the wrapped
/// regressor so that rare, far-from-mean targets dominate training.
///
/// The target statistics absorb y before K is computed.
class ChebyshevOversampler {
 public:
  explicit ChebyshevOversampler(std::uint64_t k_max = 10);

  template <OnlineRegressor R>
  OversampleReport learn(R& regressor, std::span<const double> x, double y) {
    const OversampleReport report = absorb(y);
    for (std::uint64_t i = 0; i < report.k; ++i) regressor.learn_one(x, y);
    return report;
  }

  /// Updates the statistics with y and returns the replication decision.
  OversampleReport absorb(double y);

  const StreamStats& stats() const noexcept { return stats_; }
  std::uint64_t k_max() const noexcept { return k_max_; }
  std::uint64_t capped_count() const noexcept { return capped_; }
  std::uint64_t total_replications() const noexcept { return total_; }

  void save(BinaryWriter& out) const;
  static ChebyshevOversampler load(BinaryReader& in);

  friend bool operator==(const ChebyshevOversampler&, const ChebyshevOversampler&) = default;

 private:
  StreamStats stats_;
  std::uint64_t k_max_;
  std::uint64_t capped_ = 0;
  std::uint64_t total_ = 0;
};

}  // namespace sxai
