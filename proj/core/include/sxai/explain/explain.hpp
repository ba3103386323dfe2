#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sxai/core/timestamp.hpp"
#include "sxai/rules/amrules.hpp"

namespace sxai {

/// "B5_MC > 8.0 and B7_H1 > -2.0"; an empty antecedent renders as "TRUE".
/// Thresholds print with one decimal, as in the rule listings operators read.
std::string render_antecedent(const std::vector<Literal>& literals,
                              const std::vector<std::string>& feature_names);

struct RenderedRule {
  std::uint64_t id = 0;
  std::string antecedent;
  double consequent = 0.0;
  double support = 0.0;
  std::vector<Literal> literals;
};

struct GlobalExplanation {
  std::int64_t snapshot_time = 0;
  std::vector<RenderedRule> rules;
  RenderedRule default_rule;
  PredictionStrategy strategy = PredictionStrategy::Mean;
  double thr_re = 0.0;
  std::size_t above = 0;
  /// Share of non-default rules whose consequent exceeds thr_re.
  double fraction_above = 0.0;
};

struct FiredRule {
  std::uint64_t id = 0;
  std::string antecedent;
  double prediction = 0.0;
  std::vector<Literal> literals;
};

struct LocalExplanation {
  std::uint64_t sample_id = 0;
  std::int64_t timestamp = 0;
  double re = 0.0;
  std::vector<FiredRule> fired;
  double final_prediction = 0.0;
  /// Feature vector the explanation was computed on.
  std::vector<double> x;
};

GlobalExplanation explain_global(const RuleSetSnapshot& snapshot, double thr_re,
                                 std::int64_t snapshot_time = 0);

LocalExplanation explain_local(const RuleSetSnapshot& snapshot, std::span<const double> x,
                               std::uint64_t sample_id, std::int64_t timestamp, double re);

/// "Rule 7: B1_H1 > 1.5 Then 1.52"; the default rule is "Rule d: ...".
std::string render_rule_line(const RenderedRule& rule);
std::string render_text(const GlobalExplanation& g);
std::string render_text(const LocalExplanation& l);

nlohmann::json to_json(const GlobalExplanation& g, const std::vector<std::string>& feature_names);
nlohmann::json to_json(const LocalExplanation& l, const std::vector<std::string>& feature_names);

/// Structured export of a rule set: literals, consequent, support stats.
nlohmann::json export_rules(const RuleSetSnapshot& snapshot);

}  // namespace sxai
