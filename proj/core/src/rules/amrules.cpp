#include "sxai/rules/amrules.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"

namespace sxai {
namespace {

// Truncated split keys can land on a bound the antecedent already imposes;
// such a literal would leave the rule empty or unchanged.
bool narrows(const std::vector<Literal>& literals, const Literal& lit) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& l : literals) {
    if (l.feature != lit.feature) continue;
    if (l.op == Op::Greater) {
      lo = std::max(lo, l.threshold);
    } else {
      hi = std::min(hi, l.threshold);
    }
  }
  return lit.threshold > lo && lit.threshold < hi;
}

template <class Range, class Project>
Prediction aggregate(const Range& rules, Project core_of, const RuleCore& fallback,
                     std::span<const double> x, PredictionStrategy strategy, bool ordered,
                     double prior) {
  Prediction p;
  double sum = 0.0;
  for (const auto& r : rules) {
    const RuleCore& core = core_of(r);
    if (!core.covers(x)) continue;
    sum += core.predict(x, strategy, prior);
    p.fired.push_back(core.id);
    if (ordered) break;
  }
  if (p.fired.empty()) {
    p.value = fallback.predict(x, strategy, prior);
    p.fired.push_back(kDefaultRuleId);
  } else {
    p.value = sum / static_cast<double>(p.fired.size());
  }
  return p;
}

void save_config(BinaryWriter& out, const AMRulesConfig& c) {
  out.put_u64(c.n_min);
  out.put_f64(c.delta);
  out.put_f64(c.tau);
  out.put_u8(static_cast<std::uint8_t>(c.strategy));
  out.put_bool(c.ordered);
  out.put_u32(static_cast<std::uint32_t>(c.splitter.significant_digits));
  out.put_u64(c.splitter.max_nodes);
  out.put_u64(c.ddm.warmup);
  out.put_f64(c.ddm.warning_level);
  out.put_f64(c.ddm.drift_level);
  out.put_bool(c.drift_detection);
  out.put_f64(c.drift_multiplier);
  out.put_f64(c.learning_rate);
  out.put_f64(c.fading);
}

AMRulesConfig load_config(BinaryReader& in) {
  AMRulesConfig c;
  c.n_min = in.get_u64();
  c.delta = in.get_f64();
  c.tau = in.get_f64();
  const auto s = in.get_u8();
  if (s > 2) fail(Errc::CorruptInput, "invalid prediction strategy");
  c.strategy = static_cast<PredictionStrategy>(s);
  c.ordered = in.get_bool();
  c.splitter.significant_digits = static_cast<int>(in.get_u32());
  c.splitter.max_nodes = in.get_u64();
  c.ddm.warmup = in.get_u64();
  c.ddm.warning_level = in.get_f64();
  c.ddm.drift_level = in.get_f64();
  c.drift_detection = in.get_bool();
  c.drift_multiplier = in.get_f64();
  c.learning_rate = in.get_f64();
  c.fading = in.get_f64();
  return c;
}

}  // namespace

double hoeffding_bound(double delta, double n) {
  if (n <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::log(1.0 / delta) / (2.0 * n));
}

Prediction RuleSetSnapshot::predict(std::span<const double> x) const {
  return aggregate(rules, [](const RuleCore& r) -> const RuleCore& { return r; }, default_rule, x,
                   strategy, ordered, prior_mean);
}

const RuleCore* RuleSetSnapshot::find(std::uint64_t id) const {
  if (id == kDefaultRuleId) return &default_rule;
  for (const auto& r : rules) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

AMRules::AMRules(std::vector<std::string> feature_names, AMRulesConfig config)
    : names_(std::move(feature_names)), config_(config) {
  if (names_.empty()) fail(Errc::ConfigError, "rule learner needs at least one feature");
  if (config_.n_min == 0) fail(Errc::ConfigError, "n_min must be positive");
  if (!(config_.delta > 0.0 && config_.delta < 1.0)) fail(Errc::ConfigError, "delta must lie in (0,1)");
  if (!(config_.fading > 0.0 && config_.fading < 1.0)) fail(Errc::ConfigError, "fading must lie in (0,1)");
  default_ = fresh_rule(kDefaultRuleId);
}

AMRules::Rule AMRules::fresh_rule(std::uint64_t id) const {
  Rule r;
  r.core.id = id;
  r.core.weights.assign(names_.size(), 0.0);
  r.splitters.assign(names_.size(), TebstSplitter(config_.splitter));
  r.ddm = Ddm(config_.ddm);
  return r;
}

void AMRules::reset_learning_state(Rule& rule) const {
  rule.core.target = {};
  rule.core.mae_mean = 0.0;
  rule.core.mae_linear = 0.0;
  rule.splitters.assign(names_.size(), TebstSplitter(config_.splitter));
  rule.ddm.reset();
  rule.last_attempt = 0.0;
}

void AMRules::validate(std::span<const double> x) const {
  if (x.size() < names_.size()) {
    fail(Errc::MissingFeature, "feature vector has " + std::to_string(x.size()) + " entries, expected " +
                                   std::to_string(names_.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) fail(Errc::InvalidValue, "non-finite feature value");
  }
}

Prediction AMRules::predict(std::span<const double> x) const {
  return aggregate(rules_, [](const Rule& r) -> const RuleCore& { return r.core; }, default_.core, x,
                   config_.strategy, config_.ordered, prior_.mean());
}

bool AMRules::update_rule(Rule& rule, std::span<const double> x, double y) {
  RuleCore& c = rule.core;
  bool drift = false;
  if (c.target.n > 0.0) {
    const double p_mean = c.target.mean();
    const double p_lin = c.predict_linear(x);
    const bool use_linear = config_.strategy == PredictionStrategy::Linear ||
                            (config_.strategy == PredictionStrategy::Adaptive && c.mae_linear < c.mae_mean);
    const double p_active = use_linear ? p_lin : p_mean;
    const double mae_active = use_linear ? c.mae_linear : c.mae_mean;
    if (config_.drift_detection) {
      const bool error = std::fabs(y - p_active) > config_.drift_multiplier * mae_active;
      drift = rule.ddm.update(error) == DriftStatus::Drift;
    }
    const double lambda = config_.fading;
    c.mae_mean = lambda * c.mae_mean + (1.0 - lambda) * std::fabs(y - p_mean);
    c.mae_linear = lambda * c.mae_linear + (1.0 - lambda) * std::fabs(y - p_lin);
  }

  c.target.add(y);
  for (std::size_t j = 0; j < names_.size(); ++j) rule.splitters[j].insert(x[j], y);

  // Normalized step: fault windows push features far outside the fitted
  // scale and a plain step diverges there.
  const double err = y - c.predict_linear(x);
  double norm = 1.0;
  for (double v : x) norm += v * v;
  const double step = config_.learning_rate * err / std::max(1.0, config_.learning_rate * norm);
  for (std::size_t j = 0; j < names_.size(); ++j) c.weights[j] += step * x[j];
  c.bias += step;
  return !drift;
}

std::optional<Literal> AMRules::try_expand(std::span<const TebstSplitter> splitters, double n) const {
  struct Ranked {
    std::size_t feature;
    SplitCandidate split;
  };
  std::vector<Ranked> ranked;
  for (std::size_t j = 0; j < splitters.size(); ++j) {
    auto c = splitters[j].best_split();
    if (c && c->sdr > 0.0) ranked.push_back({j, *c});
  }
  if (ranked.empty()) return std::nullopt;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.split.sdr > b.split.sdr; });

  const double best = ranked[0].split.sdr;
  const double second = ranked.size() > 1 ? ranked[1].split.sdr : 0.0;
  const double eps = hoeffding_bound(config_.delta, n);
  if (!(second / best < 1.0 - eps || eps < config_.tau)) return std::nullopt;

  const SplitCandidate& s = ranked[0].split;
  // Keep the branch whose targets are more homogeneous.
  const Op op = s.left.stddev() <= s.right.stddev() ? Op::LessEqual : Op::Greater;
  return Literal{ranked[0].feature, op, s.threshold};
}

LearnReport AMRules::learn_one(std::span<const double> x, double y) {
  validate(x);
  if (!std::isfinite(y)) fail(Errc::InvalidValue, "non-finite target");

  LearnReport report;
  auto maybe_expand = [&](Rule& rule, bool is_default) {
    if (rule.core.target.n - rule.last_attempt < static_cast<double>(config_.n_min)) return;
    rule.last_attempt = rule.core.target.n;
    report.attempted.push_back(rule.core.id);
    auto lit = try_expand(rule.splitters, rule.core.target.n);
    if (!lit || !narrows(rule.core.literals, *lit)) return;
    if (is_default) {
      Rule spawned = fresh_rule(next_id_++);
      spawned.core.literals.push_back(*lit);
      spawned.core.weights = rule.core.weights;
      spawned.core.bias = rule.core.bias;
      report.created.push_back(spawned.core.id);
      rules_.push_back(std::move(spawned));
      reset_learning_state(default_);
    } else {
      rule.core.literals.push_back(*lit);
      reset_learning_state(rule);
      report.expanded.push_back(rule.core.id);
    }
  };

  std::vector<std::size_t> drifted;
  bool covered = false;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (!rules_[i].core.covers(x)) continue;
    covered = true;
    report.updated.push_back(rules_[i].core.id);
    if (update_rule(rules_[i], x, y)) {
      maybe_expand(rules_[i], false);
    } else {
      drifted.push_back(i);
    }
    if (config_.ordered) break;
  }
  if (!covered) {
    report.updated.push_back(kDefaultRuleId);
    if (update_rule(default_, x, y)) {
      maybe_expand(default_, true);
    } else {
      reset_learning_state(default_);
      report.default_reset = true;
    }
  }
  for (auto it = drifted.rbegin(); it != drifted.rend(); ++it) {
    report.removed.push_back(rules_[*it].core.id);
    rules_.erase(rules_.begin() + static_cast<std::ptrdiff_t>(*it));
  }
  prior_.update(y);
  return report;
}

std::shared_ptr<const RuleSetSnapshot> AMRules::snapshot() const {
  auto s = std::make_shared<RuleSetSnapshot>();
  s->feature_names = names_;
  s->strategy = config_.strategy;
  s->ordered = config_.ordered;
  s->rules.reserve(rules_.size());
  for (const auto& r : rules_) s->rules.push_back(r.core);
  s->default_rule = default_.core;
  s->prior_mean = prior_.mean();
  return s;
}

std::size_t AMRules::memory_bytes() const noexcept {
  auto rule_bytes = [](const Rule& r) {
    std::size_t b = sizeof(Rule) + r.core.literals.size() * sizeof(Literal) +
                    r.core.weights.size() * sizeof(double);
    for (const auto& s : r.splitters) b += s.memory_bytes();
    return b;
  };
  std::size_t total = sizeof(*this) + rule_bytes(default_);
  for (const auto& r : rules_) total += rule_bytes(r);
  return total;
}

void AMRules::save(BinaryWriter& out) const {
  out.put_u64(names_.size());
  for (const auto& n : names_) out.put_string(n);
  save_config(out, config_);
  auto save_rule = [&](const Rule& r) {
    r.core.save(out);
    out.put_u64(r.splitters.size());
    for (const auto& s : r.splitters) s.save(out);
    r.ddm.save(out);
    out.put_f64(r.last_attempt);
  };
  out.put_u64(rules_.size());
  for (const auto& r : rules_) save_rule(r);
  save_rule(default_);
  prior_.save(out);
  out.put_u64(next_id_);
}

AMRules AMRules::load(BinaryReader& in) {
  std::vector<std::string> names(in.get_count(1 << 20));
  for (auto& n : names) n = in.get_string();
  AMRulesConfig config = load_config(in);
  AMRules learner(std::move(names), config);
  auto load_rule = [&]() {
    Rule r;
    r.core = RuleCore::load(in);
    r.splitters.resize(in.get_count(1 << 20));
    for (auto& s : r.splitters) s = TebstSplitter::load(in);
    r.ddm = Ddm::load(in);
    r.last_attempt = in.get_f64();
    if (r.splitters.size() != learner.names_.size() || r.core.weights.size() != learner.names_.size()) {
      fail(Errc::CorruptInput, "rule width does not match feature count");
    }
    return r;
  };
  const auto count = in.get_count(1 << 20);
  for (std::uint64_t i = 0; i < count; ++i) learner.rules_.push_back(load_rule());
  learner.default_ = load_rule();
  learner.prior_ = StreamStats::load(in);
  learner.next_id_ = in.get_u64();
  return learner;
}

}  // namespace sxai
