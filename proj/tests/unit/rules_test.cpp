#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"
#include "sxai/rules/amrules.hpp"
#include "sxai/rules/ddm.hpp"
#include "sxai/rules/rule.hpp"
#include "sxai/rules/tebst.hpp"
#include "support/oracles.hpp"

namespace sxai {
namespace {

TEST(Tebst, DuplicateAndOrder) {
  TebstSplitter t({0, 0});
  t.insert(2.0, 1.0);
  t.insert(2.0, 3.0);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.total().n, 2.0);
  TebstSplitter u({0, 0});
  for (double v : {2.0, 1.0, 3.0}) u.insert(v, v);
  EXPECT_EQ(u.keys(), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(Tebst, NodeCap) {
  TebstSplitter t({3, 100});
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 10000; ++i) t.insert(nd(gen), nd(gen));
  EXPECT_LE(t.size(), 100u);
  EXPECT_EQ(t.total().n, 10000.0);
}

TEST(Tebst, RoundSignificant) {
  EXPECT_EQ(round_significant(123.456, 3), 123.0);
  EXPECT_DOUBLE_EQ(round_significant(0.0012345, 2), 0.0012);
  EXPECT_EQ(round_significant(7.77, 0), 7.77);
}

TEST(Tebst, ConstantTargetsAndPerfectSeparator) {
  TebstSplitter c({0, 0});
  for (int i = 0; i < 10; ++i) c.insert(i, 4.0);
  EXPECT_EQ(c.best_split()->sdr, 0.0);

  TebstSplitter p({0, 0});
  for (int i = 0; i < 20; ++i) p.insert(i % 2, i % 2);
  const auto s = p.best_split();
  ASSERT_TRUE(s);
  EXPECT_EQ(s->threshold, 0.0);
  EXPECT_DOUBLE_EQ(s->sdr, 0.5);
  EXPECT_EQ(s->left.stddev(), 0.0);
}

TEST(Tebst, BestSplitMatchesBruteForce) {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + gen() % 199;
    std::uniform_real_distribution<double> u(-10, 10);
    std::normal_distribution<double> nd;
    std::vector<double> x(n), y(n);
    const bool coarse = rep % 3 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = coarse ? std::round(u(gen)) : u(gen);
      y[i] = (x[i] > 2.0 ? 3.0 : 0.0) + nd(gen);
    }
    TebstSplitter t({0, 0});
    for (std::size_t i = 0; i < n; ++i) t.insert(x[i], y[i]);
    const auto got = t.best_split();
    const auto want = oracle::best_split(x, y);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (!want) continue;
    EXPECT_EQ(got->threshold, want->threshold) << "rep " << rep;
    EXPECT_NEAR(got->sdr, want->sdr, 1e-9);
  }
}

TEST(Tebst, SaveLoad) {
  TebstSplitter t;
  for (int i = 0; i < 50; ++i) t.insert(i * 0.37, i % 5);
  BinaryWriter w;
  t.save(w);
  BinaryReader r(w.bytes());
  EXPECT_EQ(TebstSplitter::load(r), t);
}

TEST(Ddm, QuietStream) {
  Ddm d;
  for (int i = 0; i < 5000; ++i) ASSERT_EQ(d.update(false), DriftStatus::Normal);
}

TEST(Ddm, RateTriplesSignalsDrift) {
  std::mt19937_64 gen(8);
  std::bernoulli_distribution low(0.1), high(0.3);
  Ddm d;
  for (int i = 0; i < 2000; ++i) ASSERT_NE(d.update(low(gen)), DriftStatus::Drift);
  bool drift = false;
  for (int i = 0; i < 2000 && !drift; ++i) drift = d.update(high(gen)) == DriftStatus::Drift;
  EXPECT_TRUE(drift);
  EXPECT_EQ(d.t(), 0u);
}

TEST(Ddm, WarningPrecedesDriftOnRamp) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u;
  Ddm d;
  bool warned = false;
  int ramp_drifts = 0;
  for (int i = 0; i < 8000; ++i) {
    const double rate = 0.1 + 0.5 * std::min(1.0, std::max(0.0, (i - 2000) / 4000.0));
    const auto s = d.update(u(gen) < rate);
    if (s == DriftStatus::Warning) warned = true;
    if (s == DriftStatus::Drift) {
      if (i >= 2000) {
        EXPECT_TRUE(warned) << "drift at " << i;
        ++ramp_drifts;
      }
      warned = false;
    }
  }
  EXPECT_GE(ramp_drifts, 1);
}

TEST(Literal, Semantics) {
  const std::vector<std::string> names{"B5_MC", "B7_H1", "B1_H1"};
  RuleCore empty;
  EXPECT_TRUE(empty.covers(std::vector<double>{9, 9, 9}));
  const Literal strict{2, Op::Greater, 1.5};
  EXPECT_FALSE(strict.holds(std::vector<double>{0, 0, 1.5}));
  RuleCore r0;
  r0.literals = {{0, Op::Greater, 8.0}, {1, Op::Greater, -2.0}};
  EXPECT_TRUE(r0.covers(std::vector<double>{8.1, 0.0, 0.0}));
  EXPECT_FALSE(r0.covers(std::vector<double>{8.0, 0.0, 0.0}));
  try {
    strict.holds(std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingFeature);
  }
}

RuleCore rule_with_targets(std::uint64_t id, std::vector<Literal> lits, std::initializer_list<double> ys) {
  RuleCore r;
  r.id = id;
  r.literals = std::move(lits);
  for (double y : ys) r.target.add(y);
  r.weights.assign(1, 0.0);
  return r;
}

TEST(Rule, Predictions) {
  const auto r = rule_with_targets(0, {}, {1, 2, 3});
  const std::vector<double> x{5.0};
  EXPECT_EQ(r.predict(x, PredictionStrategy::Mean, 0.0), 2.0);
  auto lin = r;
  lin.bias = 0.75;
  EXPECT_EQ(lin.predict(x, PredictionStrategy::Linear, 0.0), 0.75);
  lin.mae_linear = 0.1;
  lin.mae_mean = 0.5;
  EXPECT_EQ(lin.predict(x, PredictionStrategy::Adaptive, 0.0), 0.75);
  RuleCore unseen;
  EXPECT_EQ(unseen.predict(x, PredictionStrategy::Mean, 9.0), 9.0);
}

TEST(Rule, AdaptiveSelectsLinearOnLinearTarget) {
  AMRulesConfig cfg;
  cfg.strategy = PredictionStrategy::Adaptive;
  cfg.n_min = 1'000'000;
  cfg.drift_detection = false;
  AMRules m({"x"}, cfg);
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 5000; ++i) {
    const double x = u(gen);
    m.learn_one(std::vector<double>{x}, 2.0 * x + 1.0);
  }
  const auto& d = m.default_rule();
  EXPECT_LT(d.mae_linear, d.mae_mean);
  const std::vector<double> x{0.5};
  EXPECT_NEAR(m.predict(x).value, d.predict_linear(x), 1e-12);
  EXPECT_NEAR(m.predict(x).value, 2.0, 0.1);
}

TEST(RuleSet, Aggregation) {
  RuleSetSnapshot s;
  s.feature_names = {"a"};
  s.rules = {rule_with_targets(0, {{0, Op::Greater, 0.0}}, {1.0}),
             rule_with_targets(1, {{0, Op::Greater, -1.0}}, {2.0})};
  s.default_rule = rule_with_targets(kDefaultRuleId, {}, {7.0});
  const std::vector<double> both{0.5}, none{-3.0};
  EXPECT_EQ(s.predict(both).value, 1.5);
  EXPECT_EQ(s.predict(both).fired, (std::vector<std::uint64_t>{0, 1}));
  EXPECT_EQ(s.predict(none).value, 7.0);
  EXPECT_EQ(s.predict(none).fired, (std::vector<std::uint64_t>{kDefaultRuleId}));
  s.ordered = true;
  EXPECT_EQ(s.predict(both).value, 1.0);
  EXPECT_EQ(s.predict(both).fired, (std::vector<std::uint64_t>{0}));
}

TEST(AMRules, FirstExample) {
  AMRules m({"a", "b"});
  m.learn_one(std::vector<double>{1, 2}, 4.5);
  EXPECT_EQ(m.default_rule().target.n, 1.0);
  EXPECT_EQ(m.default_rule().target.mean(), 4.5);
  EXPECT_EQ(m.rule_count(), 0u);
}

TEST(AMRules, HoeffdingBound) {
  EXPECT_NEAR(hoeffding_bound(0.05, 100), std::sqrt(std::log(20.0) / 200.0), 1e-15);
  EXPECT_NEAR(hoeffding_bound(0.05, 100), 0.1224, 1e-4);
  EXPECT_LT(hoeffding_bound(0.05, 1e12), 1e-5);
}

TEST(AMRules, ExpansionAttemptsEveryNMin) {
  AMRulesConfig cfg;
  cfg.drift_detection = false;
  AMRules m({"a"}, cfg);
  std::vector<std::size_t> attempts;
  for (std::size_t i = 1; i <= 450; ++i) {
    const auto rep = m.learn_one(std::vector<double>{1.0}, 2.0);
    if (!rep.attempted.empty()) attempts.push_back(i);
  }
  EXPECT_EQ(attempts, (std::vector<std::size_t>{100, 200, 300, 400}));
  EXPECT_EQ(m.rule_count(), 0u);
}

TEST(AMRules, TryExpandNeedsPositiveSdr) {
  AMRules m({"a", "b"});
  std::vector<TebstSplitter> sp(2, TebstSplitter({0, 0}));
  for (int i = 0; i < 200; ++i) {
    sp[0].insert(i, 1.0);
    sp[1].insert(-i, 1.0);
  }
  EXPECT_FALSE(m.try_expand(sp, 200).has_value());
}

TEST(AMRules, TryExpandWithLargeN) {
  AMRules m({"a", "b"});
  std::vector<TebstSplitter> sp(2, TebstSplitter({0, 0}));
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd(0.0, 0.1);
  for (int i = 0; i < 400; ++i) {
    const double a = i % 20, b = (i * 7) % 13;
    const double y = (a > 9 ? 1.0 : 0.0) + 0.3 * (b > 6 ? 1.0 : 0.0) + nd(gen);
    sp[0].insert(a, y);
    sp[1].insert(b, y);
  }
  const auto lit = m.try_expand(sp, 1e9);
  ASSERT_TRUE(lit);
  EXPECT_EQ(lit->feature, 0u);
  EXPECT_EQ(lit->threshold, 9.0);
}

TEST(AMRules, LearnsPiecewiseTarget) {
  AMRules m({"a", "b"});
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> nd(0, 0.05);
  for (int i = 0; i < 3000; ++i) {
    const double a = u(gen), b = u(gen);
    m.learn_one(std::vector<double>{a, b}, (a > 0.7 ? 3.0 : 0.0) + nd(gen));
  }
  ASSERT_GE(m.rule_count(), 1u);
  EXPECT_EQ(m.rule(0).literals.front().feature, 0u);
  EXPECT_NEAR(m.rule(0).literals.front().threshold, 0.7, 0.05);
  EXPECT_NEAR(m.predict(std::vector<double>{0.9, 0.5}).value, 3.0, 0.2);
  EXPECT_NEAR(m.predict(std::vector<double>{0.2, 0.5}).value, 0.0, 0.2);
}

TEST(AMRules, DriftRemovesRule) {
  AMRules m({"a", "b"});
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> nd(0, 0.05);
  for (int i = 0; i < 6000; ++i) {
    const double a = u(gen), b = u(gen);
    m.learn_one(std::vector<double>{a, b}, (a > 0.5 ? 2.0 : 0.0) + nd(gen));
  }
  ASSERT_GE(m.rule_count(), 1u);
  RuleCore target = m.rule(0);
  for (std::size_t k = 1; k < m.rule_count(); ++k) {
    if (m.rule(k).target.n > target.target.n) target = m.rule(k);
  }
  ASSERT_GT(target.target.n, 100.0);
  bool removed = false;
  for (int i = 0; i < 5000 && !removed; ++i) {
    const std::vector<double> x{u(gen), u(gen)};
    if (!target.covers(x)) continue;
    const auto rep = m.learn_one(x, 10.0 + nd(gen));
    removed = std::find(rep.removed.begin(), rep.removed.end(), target.id) != rep.removed.end();
  }
  EXPECT_TRUE(removed);
}

TEST(AMRules, LinearModelStaysFiniteOnOutliers) {
  AMRules m({"a", "b"});
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd(0, 1);
  for (int i = 0; i < 3000; ++i) {
    const double scale = i % 50 == 0 ? 500.0 : 1.0;
    const double a = scale * nd(gen), b = nd(gen);
    m.learn_one(std::vector<double>{a, b}, 0.5 * b + 0.1 * nd(gen));
  }
  const auto s = m.snapshot();
  for (double w : s->default_rule.weights) EXPECT_TRUE(std::isfinite(w));
  for (const auto& r : s->rules)
    for (double w : r.weights) EXPECT_TRUE(std::isfinite(w));
}

TEST(AMRules, RejectsBadInput) {
  AMRules m({"a", "b"});
  auto code = [&](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  EXPECT_EQ(code([&] { m.learn_one(std::vector<double>{1.0}, 1.0); }), Errc::MissingFeature);
  EXPECT_EQ(code([&] { m.learn_one(std::vector<double>{1.0, NAN}, 1.0); }), Errc::InvalidValue);
}

TEST(AMRules, SaveLoadAndSnapshot) {
  AMRules m({"a", "b"});
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1500; ++i) {
    const double a = u(gen), b = u(gen);
    m.learn_one(std::vector<double>{a, b}, a > 0.5 ? 1.0 + b : 0.0);
  }
  BinaryWriter w;
  m.save(w);
  BinaryReader r(w.bytes());
  const AMRules back = AMRules::load(r);
  EXPECT_EQ(back, m);
  const auto snap = m.snapshot();
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x{u(gen), u(gen)};
    EXPECT_EQ(snap->predict(x).value, m.predict(x).value);
    EXPECT_EQ(snap->predict(x).fired, m.predict(x).fired);
  }
}

}  // namespace
}  // namespace sxai
