#include "sxai/data/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/boxplot.hpp"
#include "sxai/core/error.hpp"
#include "sxai/core/timestamp.hpp"

namespace sxai {
namespace {

struct Binned {
  Analog sensor;
  const char* tag;
};

constexpr Binned kBinned[] = {{Analog::TP2, "TP2"},
                              {Analog::TP3, "TP3"},
                              {Analog::H1, "H1"},
                              {Analog::Flowmeter, "Flow"},
                              {Analog::Motor_current, "MC"}};

struct Ranged {
  Analog sensor;
  const char* tag;
};

constexpr Ranged kRanged[] = {
    {Analog::Oil_temperature, "Oil"}, {Analog::DV_pressure, "DV"}, {Analog::Reservoirs, "Res"}};

std::string sensor_name(Analog a) { return std::string(kAnalogNames[static_cast<std::size_t>(a)]); }

double trailing_mean(const std::vector<double>& v, std::size_t n) {
  const std::size_t k = std::min(n, v.size());
  double s = 0.0;
  for (std::size_t i = v.size() - k; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(k);
}

constexpr double kMinStd = 1e-9;

}  // namespace

FeatureSchema::FeatureSchema(const FeatureConfig& config) {
  if (config.charge_bins == 0 || config.empty_bins == 0 || config.ma_short == 0 || config.ma_long == 0)
    fail(Errc::ConfigError, "feature bin counts and window sizes must be positive");
  const std::size_t bins = config.charge_bins + config.empty_bins;
  for (const auto& b : kBinned)
    for (std::size_t j = 1; j <= bins; ++j) {
      names_.push_back("B" + std::to_string(j) + "_" + b.tag);
      sensors_.push_back(sensor_name(b.sensor));
    }
  for (auto d : kDigitalNames) {
    names_.push_back("Ones_" + std::string(d));
    sensors_.emplace_back(d);
  }
  for (const auto& r : kRanged) {
    names_.push_back(std::string("Min_") + r.tag);
    sensors_.push_back(sensor_name(r.sensor));
    names_.push_back(std::string("Max_") + r.tag);
    sensors_.push_back(sensor_name(r.sensor));
  }
  names_.insert(names_.end(), {"T_run", "T_idle", "MA1_Oil", "MA2_Oil", "Med_DV"});
  sensors_.insert(sensors_.end(), {"COMP", "COMP", "Oil_temperature", "Oil_temperature", "DV_pressure"});
}

std::size_t FeatureSchema::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) fail(Errc::MissingFeature, "no feature named '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> bin_means(std::span<const double> values, std::size_t bins) {
  const std::size_t n = values.size();
  if (n == 0 || bins == 0) fail(Errc::EmptyInput, "binning needs samples and bins");
  std::vector<double> out(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    std::size_t lo = j * n / bins;
    std::size_t hi = (j + 1) * n / bins;
    if (lo >= n) lo = n - 1;
    if (hi <= lo) hi = lo + 1;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    out[j] = s / static_cast<double>(hi - lo);
  }
  return out;
}

CycleFeatures extract_features(const Cycle& cycle, const FeatureConfig& config) {
  if (cycle.records.empty()) fail(Errc::EmptyInput, "cannot extract features from an empty cycle");
  const FeatureSchema schema(config);
  CycleFeatures f;
  f.values.reserve(schema.size());
  const auto& recs = cycle.records;

  for (const auto& b : kBinned) {
    std::vector<double> charge, empty;
    for (const auto& r : recs) (r[Digital::COMP] ? empty : charge).push_back(r[b.sensor]);
    // A missing phase borrows the value where it would have begun.
    if (charge.empty()) {
      charge.push_back(recs.front()[b.sensor]);
      f.degenerate_phase = true;
    }
    if (empty.empty()) {
      empty.push_back(recs.back()[b.sensor]);
      f.degenerate_phase = true;
    }
    for (double v : bin_means(charge, config.charge_bins)) f.values.push_back(v);
    for (double v : bin_means(empty, config.empty_bins)) f.values.push_back(v);
  }
  for (std::size_t d = 0; d < kDigitalCount; ++d) {
    double ones = 0.0;
    for (const auto& r : recs) ones += r.digital[d];
    f.values.push_back(ones);
  }
  for (const auto& g : kRanged) {
    double lo = recs.front()[g.sensor], hi = lo;
    for (const auto& r : recs) {
      lo = std::min(lo, r[g.sensor]);
      hi = std::max(hi, r[g.sensor]);
    }
    f.values.push_back(lo);
    f.values.push_back(hi);
  }
  f.values.push_back(static_cast<double>(cycle.t_run()));
  f.values.push_back(static_cast<double>(cycle.t_idle()));

  std::vector<double> oil, dv;
  for (const auto& r : recs) {
    oil.push_back(r[Analog::Oil_temperature]);
    dv.push_back(r[Analog::DV_pressure]);
  }
  f.values.push_back(trailing_mean(oil, config.ma_short));
  f.values.push_back(trailing_mean(oil, config.ma_long));
  std::sort(dv.begin(), dv.end());
  f.values.push_back(quantile_sorted(dv, 0.5));
  return f;
}

void write_features_csv(std::ostream& out, const FeatureSchema& schema, std::span<const Cycle> cycles,
                        const FeatureConfig& config) {
  out << "cycle,start,end";
  for (const auto& n : schema.names()) out << ',' << n;
  out << '\n';
  char buf[32];
  for (const auto& c : cycles) {
    out << c.index << ',' << format_timestamp(c.start_ts()) << ',' << format_timestamp(c.end_ts());
    for (double v : extract_features(c, config).values) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

FeatureScaler::FeatureScaler(std::size_t features, std::size_t warmup)
    : stats_(features), warmup_(warmup) {
  if (warmup == 0) freeze();
}

FeatureScaler FeatureScaler::frozen(std::vector<double> mean, std::vector<double> stddev) {
  if (mean.size() != stddev.size()) fail(Errc::ShapeError, "scaler mean/stddev length mismatch");
  FeatureScaler s;
  s.stats_.resize(mean.size());
  s.frozen_ = true;
  s.mean_ = std::move(mean);
  s.std_ = std::move(stddev);
  for (double& v : s.std_)
    if (!(v > kMinStd)) v = 1.0;
  return s;
}

void FeatureScaler::observe(std::span<const double> x) {
  if (frozen_) return;
  if (x.size() != stats_.size()) fail(Errc::ShapeError, "feature vector length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) stats_[i].update(x[i]);
  if (stats_.empty() || stats_[0].count() >= warmup_) freeze();
}

void FeatureScaler::freeze() {
  mean_ = mean();
  std_ = stddev();
  frozen_ = true;
}

std::vector<double> FeatureScaler::mean() const {
  if (frozen_) return mean_;
  std::vector<double> m;
  for (const auto& s : stats_) m.push_back(s.mean());
  return m;
}

std::vector<double> FeatureScaler::stddev() const {
  if (frozen_) return std_;
  std::vector<double> sd;
  for (const auto& s : stats_) sd.push_back(s.stddev() > kMinStd ? s.stddev() : 1.0);
  return sd;
}

std::vector<double> FeatureScaler::transform(std::span<const double> x) const {
  if (x.size() != stats_.size()) fail(Errc::ShapeError, "feature vector length mismatch");
  const auto m = mean();
  const auto sd = stddev();
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m[i]) / sd[i];
  return z;
}

void FeatureScaler::save(BinaryWriter& out) const {
  out.put_u64(stats_.size());
  for (const auto& s : stats_) s.save(out);
  out.put_u64(warmup_);
  out.put_bool(frozen_);
  out.put_f64s(mean_);
  out.put_f64s(std_);
}

FeatureScaler FeatureScaler::load(BinaryReader& in) {
  FeatureScaler s;
  const auto n = in.get_count();
  for (std::size_t i = 0; i < n; ++i) s.stats_.push_back(StreamStats::load(in));
  s.warmup_ = in.get_u64();
  s.frozen_ = in.get_bool();
  s.mean_ = in.get_f64s();
  s.std_ = in.get_f64s();
  return s;
}

}  // namespace sxai
