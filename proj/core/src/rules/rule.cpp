#include "sxai/rules/rule.hpp"

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"

namespace sxai {

bool Literal::holds(std::span<const double> x) const {
  if (feature >= x.size()) {
    fail(Errc::MissingFeature, "literal references feature " + std::to_string(feature) +
                                   " but the vector has " + std::to_string(x.size()));
  }
  return op == Op::LessEqual ? x[feature] <= threshold : x[feature] > threshold;
}

std::string_view to_string(PredictionStrategy s) noexcept {
  switch (s) {
    case PredictionStrategy::Mean: return "mean";
    case PredictionStrategy::Linear: return "linear";
    case PredictionStrategy::Adaptive: return "adaptive";
  }
  return "mean";
}

PredictionStrategy strategy_from_string(std::string_view s) {
  if (s == "mean") return PredictionStrategy::Mean;
  if (s == "linear") return PredictionStrategy::Linear;
  if (s == "adaptive") return PredictionStrategy::Adaptive;
  fail(Errc::ConfigError, "unknown prediction strategy '" + std::string(s) + "'");
}

bool RuleCore::covers(std::span<const double> x) const {
  for (const auto& lit : literals) {
    if (!lit.holds(x)) return false;
  }
  return true;
}

double RuleCore::predict_linear(std::span<const double> x) const {
  double v = bias;
  const std::size_t n = std::min(weights.size(), x.size());
  for (std::size_t j = 0; j < n; ++j) v += weights[j] * x[j];
  return v;
}

double RuleCore::predict(std::span<const double> x, PredictionStrategy strategy, double prior) const {
  if (target.n <= 0.0) return prior;
  switch (strategy) {
    case PredictionStrategy::Mean:
      return target.mean();
    case PredictionStrategy::Linear:
      return predict_linear(x);
    case PredictionStrategy::Adaptive:
      return mae_linear < mae_mean ? predict_linear(x) : target.mean();
  }
  return target.mean();
}

double RuleCore::consequent(PredictionStrategy strategy, double prior) const {
  if (target.n <= 0.0) return prior;
  switch (strategy) {
    case PredictionStrategy::Mean:
      return target.mean();
    case PredictionStrategy::Linear:
      return bias;
    case PredictionStrategy::Adaptive:
      return mae_linear < mae_mean ? bias : target.mean();
  }
  return target.mean();
}

void RuleCore::save(BinaryWriter& out) const {
  out.put_u64(id);
  out.put_u64(literals.size());
  for (const auto& l : literals) {
    out.put_u64(l.feature);
    out.put_u8(static_cast<std::uint8_t>(l.op));
    out.put_f64(l.threshold);
  }
  target.save(out);
  out.put_f64s(weights);
  out.put_f64(bias);
  out.put_f64(mae_mean);
  out.put_f64(mae_linear);
}

RuleCore RuleCore::load(BinaryReader& in) {
  RuleCore r;
  r.id = in.get_u64();
  r.literals.resize(in.get_count(1 << 16));
  for (auto& l : r.literals) {
    l.feature = in.get_u64();
    const auto op = in.get_u8();
    if (op > 1) fail(Errc::CorruptInput, "invalid literal operator");
    l.op = static_cast<Op>(op);
    l.threshold = in.get_f64();
  }
  r.target = TargetStats::load(in);
  r.weights = in.get_f64s();
  r.bias = in.get_f64();
  r.mae_mean = in.get_f64();
  r.mae_linear = in.get_f64();
  return r;
}

}  // namespace sxai
