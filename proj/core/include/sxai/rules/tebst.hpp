#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sxai/rules/target_stats.hpp"

namespace sxai {

struct SplitterConfig {
  /// Values are rounded to this many significant digits before insertion;
  /// 0 disables truncation.
  int significant_digits = 3;
  /// Node budget per tree; once reached, new keys merge into the nearest
  /// existing key. 0 means unbounded.
  std::size_t max_nodes = 100;

  friend bool operator==(const SplitterConfig&, const SplitterConfig&) = default;
};

/// Rounds to `digits` significant digits (0 leaves the value untouched).
double round_significant(double value, int digits);

struct SplitCandidate {
  double threshold = 0.0;
  double sdr = 0.0;
  /// Best SDR among this feature's other thresholds.
  double second_sdr = 0.0;
  TargetStats left;   // values <= threshold
  TargetStats right;  // values > threshold
};

/// Truncated extended binary search tree over one numeric feature.
///
/// Each node keeps the target aggregates of values routed through it,
/// split into the part <= key and the part > key, so every candidate
/// threshold can be scored in one in-order pass.
class TebstSplitter {
 public:
  explicit TebstSplitter(SplitterConfig config = {});

  void insert(double value, double y);

  /// Best threshold by SDR over all keys but the largest. nullopt when fewer
  /// than two distinct keys exist. A candidate with sdr == 0 means no useful
  /// split (all targets identical).
  std::optional<SplitCandidate> best_split() const;

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  TargetStats total() const;
  /// Keys in increasing order.
  std::vector<double> keys() const;
  std::size_t memory_bytes() const noexcept;

  void save(BinaryWriter& out) const;
  static TebstSplitter load(BinaryReader& in);

  friend bool operator==(const TebstSplitter&, const TebstSplitter&) = default;

 private:
  struct Node {
    double key = 0.0;
    TargetStats le;
    TargetStats gt;
    std::int32_t left = -1;
    std::int32_t right = -1;
    friend bool operator==(const Node&, const Node&) = default;
  };

  double resolve_key(double v) const;

  SplitterConfig config_;
  std::vector<Node> nodes_;
};

}  // namespace sxai
