#include "sxai/core/boxplot.hpp"

#include <algorithm>
#include <cmath>

#include "sxai/core/error.hpp"

namespace sxai {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) fail(Errc::EmptyInput, "quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) fail(Errc::InvalidValue, "quantile probability outside [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxplotSummary boxplot_summary(std::span<const double> values) {
  if (values.empty()) fail(Errc::EmptyInput, "boxplot of empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) fail(Errc::InvalidValue, "non-finite value in boxplot input");
  }
  std::sort(sorted.begin(), sorted.end());

  BoxplotSummary box;
  box.min = sorted.front();
  box.max = sorted.back();
  box.q1 = quantile_sorted(sorted, 0.25);
  box.median = quantile_sorted(sorted, 0.5);
  box.q3 = quantile_sorted(sorted, 0.75);
  box.iqr = box.q3 - box.q1;
  box.upper_adjacent = box.q3 + 1.5 * box.iqr;
  return box;
}

double upper_fence(std::span<const double> values, double factor) {
  const BoxplotSummary box = boxplot_summary(values);
  return box.q3 + factor * box.iqr;
}

}  // namespace sxai
