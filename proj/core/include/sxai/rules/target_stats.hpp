#pragma once

#include <algorithm>
#include <cmath>

namespace sxai {

class BinaryWriter;
class BinaryReader;

/// (count, sum, sum of squares) of regression targets. Additive, so subtree
/// aggregates can be combined and subtracted.
struct TargetStats {
  double n = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double y) {
    n += 1.0;
    sum += y;
    sum_sq += y * y;
  }

  double mean() const { return n > 0.0 ? sum / n : 0.0; }

  /// Population variance, clamped at zero against rounding.
  double variance() const {
    if (n <= 0.0) return 0.0;
    const double m = sum / n;
    return std::max(0.0, sum_sq / n - m * m);
  }

  double stddev() const { return std::sqrt(variance()); }

  TargetStats& operator+=(const TargetStats& o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }

  friend TargetStats operator+(TargetStats a, const TargetStats& b) { return a += b; }
  friend TargetStats operator-(TargetStats a, const TargetStats& b) {
    a.n -= b.n;
    a.sum -= b.sum;
    a.sum_sq -= b.sum_sq;
    return a;
  }
  friend bool operator==(const TargetStats&, const TargetStats&) = default;

  void save(BinaryWriter& out) const;
  static TargetStats load(BinaryReader& in);
};

/// Standard deviation reduction of splitting `total` into `left` and the rest.
inline double sdr(const TargetStats& total, const TargetStats& left) {
  const TargetStats right = total - left;
  if (total.n <= 0.0) return 0.0;
  return total.stddev() - (left.n / total.n) * left.stddev() - (right.n / total.n) * right.stddev();
}

}  // namespace sxai
