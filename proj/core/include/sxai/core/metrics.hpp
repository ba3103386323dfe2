#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "sxai/core/relevance.hpp"

namespace sxai {

class BinaryWriter;
class BinaryReader;

/// How RMSE_phi selects and weights examples.
enum class PhiWeighting {
  /// Sum only over examples with phi(y) >= t_phi, weighted by phi, divided
  /// by the number of selected examples.
  Thresholded,
  /// Every example weighted by phi(y), divided by the window size.
  All,
};

/// Fixed-capacity sliding window of (true, predicted) pairs.
class MetricWindow {
 public:
  struct Entry {
    double y;
    double y_hat;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  explicit MetricWindow(std::size_t capacity = 1000);

  void push(double y, double y_hat);
  void clear() noexcept { entries_.clear(); }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::deque<Entry>& entries() const noexcept { return entries_; }

  /// Relevance function derived from the boxplot of the held targets.
  RelevanceFunction relevance() const;

  void save(BinaryWriter& out) const;
  static MetricWindow load(BinaryReader& in);

  friend bool operator==(const MetricWindow&, const MetricWindow&) = default;

 private:
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

/// Root mean squared error over the window. Throws Errc::EmptyInput.
double rmse(const MetricWindow& window);

/// Relevance-weighted RMSE. Returns nullopt when no example reaches t_phi
/// (no relevant cases). Throws Errc::EmptyInput on an empty window and
/// Errc::InvalidValue when t_phi is outside [0, 1].
std::optional<double> rmse_phi(const MetricWindow& window, const RelevanceFunction& phi,
                               double t_phi,
                               PhiWeighting weighting = PhiWeighting::Thresholded);

}  // namespace sxai
