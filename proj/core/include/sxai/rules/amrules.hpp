#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sxai/core/stats.hpp"
#include "sxai/rules/ddm.hpp"
#include "sxai/rules/rule.hpp"
#include "sxai/rules/tebst.hpp"

namespace sxai {

struct AMRulesConfig {
  /// Covered examples between expansion attempts.
  std::size_t n_min = 100;
  /// Split confidence.
  double delta = 0.05;
  /// Tie threshold on the Hoeffding bound.
  double tau = 0.05;
  PredictionStrategy strategy = PredictionStrategy::Mean;
  bool ordered = false;
  SplitterConfig splitter;
  DdmConfig ddm;
  bool drift_detection = true;
  /// An example counts as a DDM error when |y - y_hat| > multiplier * MAE.
  double drift_multiplier = 2.0;
  double learning_rate = 0.01;
  double fading = 0.99;

  friend bool operator==(const AMRulesConfig&, const AMRulesConfig&) = default;
};

/// Hoeffding bound sqrt(ln(1/delta) / (2 n)) for a statistic of range 1.
double hoeffding_bound(double delta, double n);

struct Prediction {
  double value = 0.0;
  /// Rules that contributed; kDefaultRuleId when only the default fired.
  std::vector<std::uint64_t> fired;
};

/// Immutable view of a rule set at one point in time.
struct RuleSetSnapshot {
  std::vector<std::string> feature_names;
  PredictionStrategy strategy = PredictionStrategy::Mean;
  bool ordered = false;
  std::vector<RuleCore> rules;
  RuleCore default_rule;
  double prior_mean = 0.0;

  Prediction predict(std::span<const double> x) const;
  const RuleCore* find(std::uint64_t id) const;
};

struct LearnReport {
  std::vector<std::uint64_t> updated;
  /// Rules that ran an expansion test on this example.
  std::vector<std::uint64_t> attempted;
  std::vector<std::uint64_t> created;
  std::vector<std::uint64_t> expanded;
  std::vector<std::uint64_t> removed;
  bool default_reset = false;
};

/// Online regression rules in the AMRules style.
///
/// Each rule keeps target statistics, a linear model, fading MAEs, one
/// TE-BST per feature and a DDM detector. Every n_min covered examples a
/// rule tries to specialize with the best SDR literal, gated by the
/// Hoeffding bound; the default rule spawns new rules the same way.
class AMRules {
 public:
  AMRules(std::vector<std::string> feature_names, AMRulesConfig config = {});

  Prediction predict(std::span<const double> x) const;
  /// Throws Errc::InvalidValue for non-finite input and Errc::MissingFeature
  /// for a short feature vector.
  LearnReport learn_one(std::span<const double> x, double y);

  /// Single-rule expansion test over best/second-best SDR across features.
  std::optional<Literal> try_expand(std::span<const TebstSplitter> splitters, double n) const;

  std::shared_ptr<const RuleSetSnapshot> snapshot() const;

  const AMRulesConfig& config() const noexcept { return config_; }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  std::size_t rule_count() const noexcept { return rules_.size(); }
  const RuleCore& rule(std::size_t i) const { return rules_.at(i).core; }
  const RuleCore& default_rule() const noexcept { return default_.core; }
  const Ddm& rule_ddm(std::size_t i) const { return rules_.at(i).ddm; }
  const Ddm& default_ddm() const noexcept { return default_.ddm; }
  double prior_mean() const noexcept { return prior_.mean(); }
  std::size_t memory_bytes() const noexcept;

  void save(BinaryWriter& out) const;
  static AMRules load(BinaryReader& in);

  friend bool operator==(const AMRules& a, const AMRules& b) {
    return a.names_ == b.names_ && a.config_ == b.config_ && a.rules_ == b.rules_ &&
           a.default_ == b.default_ && a.prior_ == b.prior_ && a.next_id_ == b.next_id_;
  }

 private:
  struct Rule {
    RuleCore core;
    std::vector<TebstSplitter> splitters;
    Ddm ddm;
    double last_attempt = 0.0;
    friend bool operator==(const Rule&, const Rule&) = default;
  };

  Rule fresh_rule(std::uint64_t id) const;
  void reset_learning_state(Rule& rule) const;
  /// Returns false when DDM signalled drift.
  bool update_rule(Rule& rule, std::span<const double> x, double y);
  void validate(std::span<const double> x) const;

  std::vector<std::string> names_;
  AMRulesConfig config_;
  std::vector<Rule> rules_;
  Rule default_;
  StreamStats prior_;
  std::uint64_t next_id_ = 0;
};

}  // namespace sxai
