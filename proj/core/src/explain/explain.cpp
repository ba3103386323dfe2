#include "sxai/explain/explain.hpp"

#include <cstdio>

#include "sxai/core/error.hpp"
#include "sxai/core/timestamp.hpp"

namespace sxai {
namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // A value that rounds to zero prints without a sign.
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string rule_label(std::uint64_t id) { return id == kDefaultRuleId ? "d" : std::to_string(id); }

nlohmann::json literals_json(const std::vector<Literal>& lits, const std::vector<std::string>& names) {
  auto arr = nlohmann::json::array();
  for (const auto& l : lits) {
    arr.push_back({{"feature", l.feature},
                   {"name", l.feature < names.size() ? names[l.feature] : std::to_string(l.feature)},
                   {"op", l.op == Op::LessEqual ? "<=" : ">"},
                   {"threshold", l.threshold}});
  }
  return arr;
}

nlohmann::json id_json(std::uint64_t id) {
  return id == kDefaultRuleId ? nlohmann::json("d") : nlohmann::json(id);
}

}  // namespace

std::string render_antecedent(const std::vector<Literal>& literals,
                              const std::vector<std::string>& feature_names) {
  if (literals.empty()) return "TRUE";
  std::string out;
  for (std::size_t i = 0; i < literals.size(); ++i) {
    const auto& l = literals[i];
    if (l.feature >= feature_names.size()) fail(Errc::MissingFeature, "literal feature has no name");
    if (i > 0) out += " and ";
    out += feature_names[l.feature];
    out += l.op == Op::LessEqual ? " <= " : " > ";
    out += fixed(l.threshold, 1);
  }
  return out;
}

GlobalExplanation explain_global(const RuleSetSnapshot& snapshot, double thr_re,
                                 std::int64_t snapshot_time) {
  GlobalExplanation g;
  g.snapshot_time = snapshot_time;
  g.strategy = snapshot.strategy;
  g.thr_re = thr_re;
  auto render = [&](const RuleCore& r) {
    return RenderedRule{r.id, render_antecedent(r.literals, snapshot.feature_names),
                        r.consequent(snapshot.strategy, snapshot.prior_mean), r.target.n, r.literals};
  };
  for (const auto& r : snapshot.rules) {
    g.rules.push_back(render(r));
    if (g.rules.back().consequent > thr_re) ++g.above;
  }
  g.default_rule = render(snapshot.default_rule);
  g.fraction_above =
      g.rules.empty() ? 0.0 : static_cast<double>(g.above) / static_cast<double>(g.rules.size());
  return g;
}

LocalExplanation explain_local(const RuleSetSnapshot& snapshot, std::span<const double> x,
                               std::uint64_t sample_id, std::int64_t timestamp, double re) {
  LocalExplanation l;
  l.sample_id = sample_id;
  l.timestamp = timestamp;
  l.re = re;
  l.x.assign(x.begin(), x.end());
  const Prediction p = snapshot.predict(x);
  l.final_prediction = p.value;
  for (auto id : p.fired) {
    const RuleCore* r = snapshot.find(id);
    if (r == nullptr) fail(Errc::InvalidValue, "fired rule missing from snapshot");
    l.fired.push_back({id, render_antecedent(r->literals, snapshot.feature_names),
                       r->predict(x, snapshot.strategy, snapshot.prior_mean), r->literals});
  }
  return l;
}

std::string render_rule_line(const RenderedRule& rule) {
  return "Rule " + rule_label(rule.id) + ": " + rule.antecedent + " Then " + fixed(rule.consequent, 2);
}

std::string render_text(const GlobalExplanation& g) {
  std::string out = "Rules: " + std::to_string(g.rules.size()) + " (" + fixed(100.0 * g.fraction_above, 1) +
                    "% above thr_re=" + fixed(g.thr_re, 2) + ")\n";
  for (const auto& r : g.rules) out += render_rule_line(r) + "\n";
  out += render_rule_line(g.default_rule) + "\n";
  return out;
}

std::string render_text(const LocalExplanation& l) {
  std::string out = "Sample " + std::to_string(l.sample_id) + " re=" + fixed(l.re, 2) + " " +
                    format_timestamp(l.timestamp) + "\n";
  for (const auto& f : l.fired) out += "Rule " + rule_label(f.id) + ": " + f.antecedent + "\n";
  out += "Final prediction: " + fixed(l.final_prediction, 2) + "\n";
  return out;
}

nlohmann::json to_json(const GlobalExplanation& g, const std::vector<std::string>& names) {
  auto rules = nlohmann::json::array();
  auto one = [&](const RenderedRule& r) {
    return nlohmann::json{{"id", id_json(r.id)},
                          {"antecedent", r.antecedent},
                          {"literals", literals_json(r.literals, names)},
                          {"consequent", r.consequent},
                          {"support", r.support}};
  };
  for (const auto& r : g.rules) rules.push_back(one(r));
  return {{"snapshot_time", g.snapshot_time},
          {"strategy", std::string(to_string(g.strategy))},
          {"thr_re", g.thr_re},
          {"rules", rules},
          {"default_rule", one(g.default_rule)},
          {"above", g.above},
          {"fraction_above", g.fraction_above}};
}

nlohmann::json to_json(const LocalExplanation& l, const std::vector<std::string>& names) {
  auto fired = nlohmann::json::array();
  for (const auto& f : l.fired) {
    fired.push_back({{"id", id_json(f.id)},
                     {"antecedent", f.antecedent},
                     {"literals", literals_json(f.literals, names)},
                     {"prediction", f.prediction}});
  }
  return {{"sample", l.sample_id},  {"timestamp", l.timestamp},
          {"time", format_timestamp(l.timestamp)}, {"re", l.re},
          {"fired", fired},         {"final_prediction", l.final_prediction},
          {"x", l.x}};
}

nlohmann::json export_rules(const RuleSetSnapshot& snapshot) {
  auto rules = nlohmann::json::array();
  auto one = [&](const RuleCore& r) {
    return nlohmann::json{{"id", id_json(r.id)},
                          {"literals", literals_json(r.literals, snapshot.feature_names)},
                          {"consequent", r.consequent(snapshot.strategy, snapshot.prior_mean)},
                          {"mean", r.predict_mean(snapshot.prior_mean)},
                          {"n", r.target.n},
                          {"stddev", r.target.stddev()},
                          {"bias", r.bias},
                          {"weights", r.weights},
                          {"mae_mean", r.mae_mean},
                          {"mae_linear", r.mae_linear}};
  };
  for (const auto& r : snapshot.rules) rules.push_back(one(r));
  return {{"strategy", std::string(to_string(snapshot.strategy))},
          {"ordered", snapshot.ordered},
          {"features", snapshot.feature_names},
          {"prior_mean", snapshot.prior_mean},
          {"rules", rules},
          {"default_rule", one(snapshot.default_rule)}};
}

}  // namespace sxai
