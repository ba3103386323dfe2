#pragma once

#include <cstdint>

namespace sxai {

class BinaryWriter;
class BinaryReader;

/// Single-pass mean and population variance (Welford).
///
/// Rejects non-finite values so one bad sample cannot poison the moments
/// that drive relevance and oversampling decisions.
class StreamStats {
 public:
  void update(double y);

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double m2() const noexcept { return m2_; }
  /// Population variance; 0 until two values have been seen.
  double variance() const noexcept;
  double stddev() const noexcept;

  void reset() noexcept { *this = StreamStats{}; }

  void save(BinaryWriter& out) const;
  static StreamStats load(BinaryReader& in);

  friend bool operator==(const StreamStats&, const StreamStats&) = default;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace sxai
