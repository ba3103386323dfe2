#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"
#include "sxai/data/csv.hpp"
#include "sxai/data/cycles.hpp"
#include "sxai/data/features.hpp"
#include "sxai/data/record.hpp"
#include "sxai/data/synth.hpp"

namespace sxai {
namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sxai::Error thrown";
  return Errc::IoError;
}

const char* kHeader =
    "timestamp,TP2,TP3,H1,DV_pressure,Reservoirs,Oil_temperature,Flowmeter,Motor_current,"
    "COMP,DV_electric,Towers,MPG,LPS,Pressure_switch,Oil_level,Caudal_impulses\n";

std::vector<RawRecord> read(const std::string& text, std::size_t budget = 1000) {
  std::istringstream in(text);
  MetroptReader reader(in, {}, budget);
  return reader.read_all();
}

std::vector<RawRecord> comp_records(std::initializer_list<int> comp) {
  std::vector<RawRecord> out;
  std::int64_t t = 1000;
  for (int c : comp) {
    RawRecord r;
    r.ts = t++;
    r.set(Digital::COMP, c != 0);
    out.push_back(r);
  }
  return out;
}

TEST(Csv, ThreeRows) {
  const std::string text = std::string(kHeader) +
                           "2022-01-01 00:00:00,1,2,3,4,5,60,7,8,1,0,1,1,0,1,0,1\n"
                           "2022-01-01 00:00:10,1,2,3,4,5,60,7,8,0,0,1,1,0,1,0,1\n"
                           "2022-01-01 00:00:20,1.5,2,3,4,5,60,7,8,0,0,1,1,0,1,0,1\n";
  const auto recs = read(text);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[2][Analog::TP2], 1.5);
  EXPECT_EQ(recs[1].ts - recs[0].ts, 10);
  EXPECT_TRUE(recs[0][Digital::COMP]);
  EXPECT_FALSE(recs[1][Digital::COMP]);
}

TEST(Csv, DomainViolationsSkipped) {
  const std::string text = std::string(kHeader) +
                           "2022-01-01 00:00:00,1,2,3,4,5,60,7,8,1,0,1,1,0,1,0,1\n"
                           "2022-01-01 00:00:01,1,2,3,4,5,60,7,8,2,0,1,1,0,1,0,1\n"
                           "2022-01-01 00:00:02,1,2,x,4,5,60,7,8,1,0,1,1,0,1,0,1\n"
                           "2022-01-01 00:00:03,1,2,3\n"
                           "2022-01-01 00:00:00,1,2,3,4,5,60,7,8,1,0,1,1,0,1,0,1\n"
                           "2022-01-01 00:00:04,1,2,3,4,5,60,7,8,1,0,1,1,0,1,0,1\n";
  std::istringstream in(text);
  MetroptReader reader(in);
  const auto recs = reader.read_all();
  EXPECT_EQ(recs.size(), 2u);
  EXPECT_EQ(reader.rows_skipped(), 4u);
  EXPECT_EQ(code_of([&] { read(text, 3); }), Errc::CorruptInput);
}

TEST(Csv, HeaderPermutationAndAliases) {
  const std::string a = std::string(kHeader) + "2022-01-01 00:00:00,1,2,3,4,5,60,7,8,1,0,1,1,0,1,0,1\n";
  const std::string b =
      "Motor_Current,Caudal_impulses,timestamp,TP3,TP2,H1,DV_pressure,Reservoirs,Oil_temperature,Flowmeter,"
      "COMP,DV_eletric,Towers,MPG,LPS,Pressure_switch,Oil_level\n"
      "8,1,2022-01-01 00:00:00,2,1,3,4,5,60,7,1,0,1,1,0,1,0\n";
  EXPECT_EQ(read(a), read(b));
}

TEST(Csv, MissingColumns) {
  std::string no_flow = kHeader;
  no_flow.replace(no_flow.find("Flowmeter,"), 10, "");
  const auto recs = read(no_flow + "2022-01-01 00:00:00,1,2,3,4,5,60,8,1,0,1,1,0,1,0,1\n");
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0][Analog::Flowmeter], 0.0);
  EXPECT_EQ(recs[0][Analog::Motor_current], 8.0);

  std::string no_tp2 = kHeader;
  no_tp2.replace(no_tp2.find("TP2,"), 4, "");
  EXPECT_EQ(code_of([&] { read(no_tp2); }), Errc::SchemaError);
}

TEST(Csv, RoundTrip) {
  GeneratorConfig g;
  g.duration = 3000;
  const auto s = synth_generate(g);
  std::stringstream buf;
  write_metropt_csv(buf, s.records);
  MetroptReader reader(buf);
  EXPECT_EQ(reader.read_all(), s.records);
}

TEST(Cycles, Definition) {
  const auto cycles = segment_cycles(comp_records({1, 0, 0, 1, 1, 0}));
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0].start_ts(), 1001);
  EXPECT_EQ(cycles[0].end_ts(), 1004);
  EXPECT_EQ(cycles[0].t_run(), 2u);
  EXPECT_EQ(cycles[0].t_idle(), 2u);
  EXPECT_TRUE(segment_cycles(comp_records({1, 1, 1, 1})).empty());
  EXPECT_TRUE(segment_cycles(comp_records({0, 0, 0})).empty());

  const auto two = segment_cycles(comp_records({1, 0, 0, 1, 0, 1, 0}));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[1].t_run(), 1u);
  EXPECT_EQ(two[1].t_idle(), 1u);
}

TEST(Cycles, RunAndIdle) {
  Cycle c;
  c.records = comp_records({0, 0, 1});
  EXPECT_EQ(c.t_run(), 2u);
  EXPECT_EQ(c.t_idle(), 1u);
}

TEST(Cycles, TruncationAndState) {
  CycleSegmenter seg(4);
  std::vector<Cycle> out;
  for (const auto& r : comp_records({1, 0, 0, 0, 1, 1, 1, 0, 1})) {
    if (auto c = seg.push(r)) out.push_back(*c);
  }
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].truncated);
  EXPECT_EQ(out[0].records.size(), 4u);
  EXPECT_EQ(seg.truncated_cycles(), 1u);
  BinaryWriter w;
  seg.save(w);
  BinaryReader r(w.bytes());
  EXPECT_EQ(CycleSegmenter::load(r), seg);
  EXPECT_EQ(seg.finish(), 2u);
}

Cycle random_cycle(std::mt19937_64& gen, std::size_t run, std::size_t idle) {
  std::normal_distribution<double> nd(5.0, 2.0);
  Cycle c;
  for (std::size_t i = 0; i < run + idle; ++i) {
    RawRecord r;
    r.ts = static_cast<std::int64_t>(i);
    for (auto& v : r.analog) v = nd(gen);
    r.set(Digital::COMP, i >= run);
    c.records.push_back(r);
  }
  return c;
}

// Mean of values[floor(jL/m) .. floor((j+1)L/m)), computed without the
// library; an empty slice falls back to the sample at its start.
double oracle_bin(const std::vector<double>& v, std::size_t j, std::size_t m) {
  const std::size_t L = v.size();
  std::size_t a = j * L / m, b = (j + 1) * L / m;
  a = std::min(a, L - 1);
  if (b <= a) return v[a];
  double s = 0.0;
  for (std::size_t i = a; i < b; ++i) s += v[i];
  return s / static_cast<double>(b - a);
}

TEST(Features, BinsMatchOracle) {
  std::mt19937_64 gen(13);
  const FeatureSchema schema;
  for (int rep = 0; rep < 50; ++rep) {
    const auto c = random_cycle(gen, 1 + gen() % 40, 1 + gen() % 90);
    const auto f = extract_features(c);
    ASSERT_EQ(f.values.size(), schema.size());
    EXPECT_FALSE(f.degenerate_phase);
    const std::pair<const char*, Analog> sensors[] = {
        {"TP2", Analog::TP2}, {"H1", Analog::H1}, {"MC", Analog::Motor_current}};
    for (const auto& [tag, sensor] : sensors) {
      std::vector<double> charge, empty;
      for (const auto& r : c.records) (r[Digital::COMP] ? empty : charge).push_back(r[sensor]);
      for (std::size_t j = 0; j < 2; ++j)
        EXPECT_NEAR(f.values[schema.index_of("B" + std::to_string(j + 1) + "_" + tag)],
                    oracle_bin(charge, j, 2), 1e-12);
      for (std::size_t j = 0; j < 5; ++j)
        EXPECT_NEAR(f.values[schema.index_of("B" + std::to_string(j + 3) + "_" + tag)],
                    oracle_bin(empty, j, 5), 1e-12);
    }
    EXPECT_EQ(f.values[schema.index_of("T_run")], static_cast<double>(c.t_run()));
    EXPECT_EQ(f.values[schema.index_of("Ones_COMP")], static_cast<double>(c.t_idle()));
  }
}

TEST(Features, ConstantAndRamp) {
  Cycle c;
  for (int i = 0; i < 30; ++i) {
    RawRecord r;
    r.ts = i;
    r[Analog::TP2] = 5.0;
    r[Analog::DV_pressure] = 0.1 * i;
    r.set(Digital::COMP, i >= 10);
    c.records.push_back(r);
  }
  const FeatureSchema schema;
  const auto f = extract_features(c);
  for (int b = 1; b <= 7; ++b) EXPECT_EQ(f.values[schema.index_of("B" + std::to_string(b) + "_TP2")], 5.0);
  EXPECT_EQ(f.values[schema.index_of("Min_DV")], 0.0);
  EXPECT_DOUBLE_EQ(f.values[schema.index_of("Max_DV")], 2.9);
}

TEST(Features, DegeneratePhaseAndErrors) {
  Cycle c;
  c.records = comp_records({0, 0, 0});
  EXPECT_TRUE(extract_features(c).degenerate_phase);
  EXPECT_EQ(code_of([] { extract_features(Cycle{}); }), Errc::EmptyInput);
  EXPECT_EQ(code_of([] { FeatureSchema().index_of("nope"); }), Errc::MissingFeature);
}

TEST(Features, ScalerFreezes) {
  FeatureScaler s(2, 3);
  s.observe(std::vector<double>{1, 5});
  s.observe(std::vector<double>{2, 5});
  s.observe(std::vector<double>{3, 5});
  EXPECT_TRUE(s.is_frozen());
  s.observe(std::vector<double>{100, 100});
  EXPECT_EQ(s.mean(), (std::vector<double>{2, 5}));
  const auto z = s.transform(std::vector<double>{2 + std::sqrt(2.0 / 3.0), 6});
  EXPECT_NEAR(z[0], 1.0, 1e-12);
  EXPECT_EQ(z[1], 1.0);
  BinaryWriter w;
  s.save(w);
  BinaryReader r(w.bytes());
  EXPECT_EQ(FeatureScaler::load(r), s);
}

TEST(Synth, ZeroFaultsAllNormal) {
  GeneratorConfig g;
  g.duration = 5000;
  const auto s = synth_generate(g);
  ASSERT_EQ(s.records.size(), 5000u);
  EXPECT_TRUE(std::all_of(s.truth.begin(), s.truth.end(), [](Regime r) { return r == Regime::Normal; }));
  for (std::size_t i = 1; i < s.records.size(); ++i) ASSERT_GT(s.records[i].ts, s.records[i - 1].ts);
}

TEST(Synth, Deterministic) {
  GeneratorConfig g;
  g.duration = 8000;
  g.faults = parse_fault_spec("air_leak:2000-4000,oil_leak:5000-7000:0.5:0.2");
  std::stringstream a, b;
  write_metropt_csv(a, synth_generate(g).records);
  write_metropt_csv(b, synth_generate(g).records);
  EXPECT_EQ(a.str(), b.str());
  g.seed = 2;
  std::stringstream c;
  write_metropt_csv(c, synth_generate(g).records);
  EXPECT_NE(a.str(), c.str());
}

double running_share(const SynthStream& s, std::size_t from, std::size_t to) {
  std::size_t run = 0;
  for (std::size_t i = from; i < to; ++i) run += !s.records[i][Digital::COMP];
  return static_cast<double>(run) / static_cast<double>(to - from);
}

TEST(Synth, AirLeakDoublesDutyCycle) {
  GeneratorConfig g;
  g.duration = 40000;
  g.faults = parse_fault_spec("air_leak:20000-40000:1.0");
  const auto s = synth_generate(g);
  EXPECT_EQ(s.truth[25000], Regime::AirLeak);
  const double normal = running_share(s, 1000, 20000);
  const double leak = running_share(s, 21000, 40000);
  EXPECT_NEAR(leak / normal, 2.0, 0.2);
}

TEST(Synth, FaultSpecParsing) {
  const auto f = parse_fault_spec("air_leak:10-20,oil_leak:30-40:0.5:0.25");
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].type, FaultType::AirLeak);
  EXPECT_EQ(f[0].severity, 1.0);
  EXPECT_EQ(f[1].start, 30u);
  EXPECT_EQ(f[1].ramp, 0.25);
  EXPECT_EQ(code_of([] { parse_fault_spec("gas_leak:1-2"); }), Errc::ConfigError);
  GeneratorConfig g;
  g.duration = 100;
  g.faults = parse_fault_spec("air_leak:10-50,oil_leak:40-60");
  EXPECT_EQ(code_of([&] { synth_generate(g); }), Errc::ConfigError);
  g.faults = parse_fault_spec("air_leak:10-500");
  EXPECT_EQ(code_of([&] { synth_generate(g); }), Errc::ConfigError);
}

TEST(Synth, PerturbedFeatures) {
  const FeatureSchema schema;
  const auto oil = perturbed_features(FaultType::OilLeak, schema);
  EXPECT_NE(std::find(oil.begin(), oil.end(), "MA1_Oil"), oil.end());
  EXPECT_NE(std::find(oil.begin(), oil.end(), "Ones_Oil_level"), oil.end());
  EXPECT_EQ(std::find(oil.begin(), oil.end(), "B1_H1"), oil.end());
  const auto air = perturbed_features(FaultType::AirLeak, schema);
  EXPECT_NE(std::find(air.begin(), air.end(), "B1_H1"), air.end());
  EXPECT_NE(std::find(air.begin(), air.end(), "T_run"), air.end());
}

}  // namespace
}  // namespace sxai
