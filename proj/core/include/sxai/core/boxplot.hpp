#pragma once

#include <span>
#include <vector>

namespace sxai {

struct BoxplotSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double iqr = 0.0;
  /// q3 + 1.5 * iqr
  double upper_adjacent = 0.0;
};

/// Quantile of already-sorted data by linear interpolation between order
/// statistics (position h = (n - 1) p + 1, the "type 7" rule).
double quantile_sorted(std::span<const double> sorted, double p);

/// Five-number summary of `values`. Throws Errc::EmptyInput on an empty span
/// and Errc::InvalidValue on non-finite entries.
BoxplotSummary boxplot_summary(std::span<const double> values);

/// Upper fence q3 + factor * iqr of `values`.
double upper_fence(std::span<const double> values, double factor);

}  // namespace sxai
