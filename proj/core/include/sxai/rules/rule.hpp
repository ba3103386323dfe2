#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sxai/rules/target_stats.hpp"

namespace sxai {

class BinaryWriter;
class BinaryReader;

enum class Op : std::uint8_t { LessEqual = 0, Greater = 1 };

/// One condition of a rule antecedent: `x[feature] <= threshold` or
/// `x[feature] > threshold`.
struct Literal {
  std::size_t feature = 0;
  Op op = Op::LessEqual;
  double threshold = 0.0;

  /// Throws Errc::MissingFeature when x is too short.
  bool holds(std::span<const double> x) const;

  friend bool operator==(const Literal&, const Literal&) = default;
};

enum class PredictionStrategy : std::uint8_t { Mean = 0, Linear = 1, Adaptive = 2 };

std::string_view to_string(PredictionStrategy s) noexcept;
PredictionStrategy strategy_from_string(std::string_view s);

inline constexpr std::uint64_t kDefaultRuleId = std::numeric_limits<std::uint64_t>::max();

/// The interpretable part of a rule: antecedent and consequent models. This
/// is what snapshots carry and what explanations are computed from.
struct RuleCore {
  std::uint64_t id = 0;
  std::vector<Literal> literals;
  TargetStats target;
  std::vector<double> weights;
  double bias = 0.0;
  double mae_mean = 0.0;
  double mae_linear = 0.0;

  bool is_default() const noexcept { return id == kDefaultRuleId; }
  bool covers(std::span<const double> x) const;

  double predict_mean(double prior) const { return target.n > 0.0 ? target.mean() : prior; }
  double predict_linear(std::span<const double> x) const;
  /// Prediction under `strategy`; rules that have seen nothing return `prior`.
  double predict(std::span<const double> x, PredictionStrategy strategy, double prior) const;
  /// Input-free consequent used for rendering: the mean, the intercept for the
  /// linear strategy, or whichever of the two the adaptive strategy favours.
  double consequent(PredictionStrategy strategy, double prior) const;

  void save(BinaryWriter& out) const;
  static RuleCore load(BinaryReader& in);

  friend bool operator==(const RuleCore&, const RuleCore&) = default;
};

}  // namespace sxai
