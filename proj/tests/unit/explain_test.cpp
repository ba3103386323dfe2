#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sxai/core/timestamp.hpp"
#include "sxai/data/features.hpp"
#include "sxai/explain/explain.hpp"

namespace sxai {
namespace {

class ExplainTest : public ::testing::Test {
 protected:
  FeatureSchema schema;
  const std::vector<std::string>& names = schema.names();

  Literal lit(const std::string& feature, Op op, double threshold) const {
    return {schema.index_of(feature), op, threshold};
  }

  RuleCore rule(std::uint64_t id, std::vector<Literal> literals, double mean, int n = 10) const {
    RuleCore r;
    r.id = id;
    r.literals = std::move(literals);
    for (int i = 0; i < n; ++i) r.target.add(mean);
    r.weights.assign(names.size(), 0.0);
    return r;
  }

  RuleSetSnapshot snapshot(std::vector<RuleCore> rules, double default_mean) const {
    RuleSetSnapshot s;
    s.feature_names = names;
    s.rules = std::move(rules);
    s.default_rule = rule(kDefaultRuleId, {}, default_mean);
    return s;
  }

  std::vector<double> zeros() const { return std::vector<double>(names.size(), 0.0); }
};

TEST_F(ExplainTest, RenderAntecedent) {
  EXPECT_EQ(render_antecedent({}, names), "TRUE");
  EXPECT_EQ(render_antecedent({lit("B5_MC", Op::Greater, 8.0), lit("B7_H1", Op::Greater, -2.0)}, names),
            "B5_MC > 8.0 and B7_H1 > -2.0");
  EXPECT_EQ(render_antecedent({lit("MA1_Oil", Op::LessEqual, -0.04)}, names), "MA1_Oil <= 0.0");
}

TEST_F(ExplainTest, RuleLine) {
  const auto g = explain_global(snapshot({rule(0, {lit("B2_H1", Op::Greater, 0.7)}, 2.65)}, 1.0), 2.57);
  EXPECT_EQ(render_rule_line(g.rules[0]), "Rule 0: B2_H1 > 0.7 Then 2.65");
  EXPECT_EQ(render_rule_line(g.default_rule), "Rule d: TRUE Then 1.00");
}

TEST_F(ExplainTest, FractionAboveThreshold) {
  std::vector<RuleCore> rules;
  const double consequents[] = {2.30, 1.58, 2.25, 2.67, 1.90, 2.65};
  for (std::uint64_t i = 0; i < 6; ++i) rules.push_back(rule(i, {lit("B1_H1", Op::Greater, i * 0.1)}, consequents[i]));
  const auto g = explain_global(snapshot(rules, 1.0), 2.57);
  EXPECT_EQ(g.above, 2u);
  EXPECT_DOUBLE_EQ(g.fraction_above, 2.0 / 6.0);
  EXPECT_EQ(render_text(g).substr(0, render_text(g).find('\n')), "Rules: 6 (33.3% above thr_re=2.57)");

  const auto empty = explain_global(snapshot({}, 1.0), 2.57);
  EXPECT_EQ(empty.rules.size(), 0u);
  EXPECT_EQ(empty.fraction_above, 0.0);

  std::vector<RuleCore> high{rule(0, {}, 3.0), rule(1, {}, 4.0)};
  EXPECT_EQ(explain_global(snapshot(high, 1.0), 2.57).fraction_above, 1.0);
}

TEST_F(ExplainTest, LocalExplanationSingleRule) {
  const auto s = snapshot({rule(7, {lit("B1_H1", Op::Greater, 1.5)}, 1.52),
                           rule(3, {lit("B3_MC", Op::Greater, 2.9)}, 2.67)},
                          0.9);
  auto x = zeros();
  x[schema.index_of("B1_H1")] = 1.8;
  const auto ts = *parse_timestamp("2022-03-22 11:48:00");
  const auto l = explain_local(s, x, 9167, ts, 2.82);
  ASSERT_EQ(l.fired.size(), 1u);
  EXPECT_EQ(l.fired[0].id, 7u);
  EXPECT_DOUBLE_EQ(l.final_prediction, 1.52);
  EXPECT_EQ(render_text(l),
            "Sample 9167 re=2.82 2022-03-22 11:48:00\n"
            "Rule 7: B1_H1 > 1.5\n"
            "Final prediction: 1.52\n");
}

TEST_F(ExplainTest, LocalExplanationConjunction) {
  const auto s = snapshot({rule(0, {lit("B3_TP2", Op::LessEqual, 5.0), lit("MA1_Oil", Op::LessEqual, 0.9)}, 1.63)},
                          0.9);
  auto x = zeros();
  x[schema.index_of("MA1_Oil")] = 0.5;
  const auto l = explain_local(s, x, 2001, *parse_timestamp("2022-02-28 15:16:00"), 3.83);
  ASSERT_EQ(l.fired.size(), 1u);
  EXPECT_EQ(l.fired[0].antecedent, "B3_TP2 <= 5.0 and MA1_Oil <= 0.9");
  EXPECT_EQ(render_text(l).substr(render_text(l).rfind("Final")), "Final prediction: 1.63\n");
}

TEST_F(ExplainTest, FallsBackToDefault) {
  const auto s = snapshot({rule(0, {lit("B1_H1", Op::Greater, 1.5)}, 1.52)}, 0.75);
  const auto l = explain_local(s, zeros(), 1, 0, 0.1);
  ASSERT_EQ(l.fired.size(), 1u);
  EXPECT_EQ(l.fired[0].id, kDefaultRuleId);
  EXPECT_EQ(l.fired[0].antecedent, "TRUE");
  EXPECT_DOUBLE_EQ(l.final_prediction, 0.75);
  const auto j = to_json(l, names);
  EXPECT_EQ(j["fired"][0]["id"], "d");
}

TEST_F(ExplainTest, MeanOfFiredRules) {
  const auto s = snapshot({rule(1, {lit("B1_H1", Op::Greater, 0.0)}, 1.0), rule(2, {lit("B2_H1", Op::Greater, 0.0)}, 2.0)},
                          0.0);
  auto x = zeros();
  x[schema.index_of("B1_H1")] = 1.0;
  x[schema.index_of("B2_H1")] = 1.0;
  const auto l = explain_local(s, x, 5, 0, 1.0);
  EXPECT_EQ(l.fired.size(), 2u);
  EXPECT_DOUBLE_EQ(l.final_prediction, 1.5);
  const auto j = to_json(l, names);
  EXPECT_EQ(j["fired"][1]["literals"][0]["name"], "B2_H1");
  EXPECT_EQ(j["fired"][1]["literals"][0]["op"], ">");
}

TEST_F(ExplainTest, DeterministicBytes) {
  const auto s = snapshot({rule(4, {lit("Max_Oil", Op::Greater, 0.9), lit("Med_DV", Op::Greater, -3.2)}, 2.64)}, 1.1);
  auto x = zeros();
  x[schema.index_of("Max_Oil")] = 2.0;
  EXPECT_EQ(render_text(explain_local(s, x, 9, 60, 2.0)), render_text(explain_local(s, x, 9, 60, 2.0)));
  EXPECT_EQ(to_json(explain_global(s, 2.5), names).dump(), to_json(explain_global(s, 2.5), names).dump());
  EXPECT_EQ(export_rules(s)["rules"][0]["literals"].size(), 2u);
}

}  // namespace
}  // namespace sxai
