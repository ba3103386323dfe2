#pragma once

#include <vector>

#include "sxai/core/boxplot.hpp"

namespace sxai {

/// Maps target values to a relevance in [0, 1] that grows toward the
/// high-extreme tail of the target distribution.
///
/// The function is a monotone piecewise-cubic Hermite interpolant through a
/// small set of control points; evaluation is clamped to the first/last
/// control relevance outside the supplied range.
class RelevanceFunction {
 public:
  struct ControlPoint {
    double y;
    double relevance;
    double slope;
  };

  /// Builds the high-tail relevance from a boxplot: (min, 0), (median, 0),
  /// (upper_adjacent, 1). Throws Errc::DegenerateDistribution when
  /// median == upper_adjacent.
  static RelevanceFunction from_boxplot(const BoxplotSummary& box);

  /// As from_boxplot, but falls back to a step at the median when the
  /// distribution is degenerate.
  static RelevanceFunction from_boxplot_or_step(const BoxplotSummary& box);

  /// General monotone interpolation through (y, relevance) knots with
  /// Fritsch-Carlson tangents. Knots must have non-decreasing y and
  /// non-decreasing relevance in [0, 1]; knots at repeated y are collapsed.
  static RelevanceFunction interpolate(std::vector<ControlPoint> knots);

  /// 0 below `at`, 1 at and above.
  static RelevanceFunction step(double at);

  /// Constant relevance everywhere.
  static RelevanceFunction constant(double value);

  double operator()(double y) const;

  const std::vector<ControlPoint>& control_points() const noexcept { return knots_; }
  bool is_step() const noexcept { return kind_ == Kind::Step; }

 private:
  enum class Kind { Hermite, Step, Constant };

  Kind kind_ = Kind::Constant;
  double constant_ = 0.0;
  double step_at_ = 0.0;
  std::vector<ControlPoint> knots_;
};

}  // namespace sxai
