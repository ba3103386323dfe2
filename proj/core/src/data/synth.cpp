#include "sxai/data/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "sxai/core/error.hpp"
#include "sxai/core/random.hpp"

namespace sxai {
namespace {

std::size_t parse_size(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    fail(Errc::ConfigError, "bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    fail(Errc::ConfigError, "bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

void validate(const GeneratorConfig& c) {
  const auto& w = c.waveforms;
  if (!(w.interrupt_probability >= 0.0 && w.interrupt_probability <= 1.0))
    fail(Errc::ConfigError, "interrupt probability must lie in [0, 1]");
  if (c.duration == 0) fail(Errc::ConfigError, "generator duration must be positive");
  if (!(w.pressure_high > w.pressure_low) || !(w.charge_rate > 2 * w.consumption) || !(w.consumption > 0))
    fail(Errc::ConfigError, "generator pressure dynamics cannot cycle");
  std::vector<FaultSpec> sorted = c.faults;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& f = sorted[i];
    if (f.start >= f.end || f.end > c.duration)
      fail(Errc::ConfigError, "fault interval [" + std::to_string(f.start) + ", " + std::to_string(f.end) +
                                  ") outside duration " + std::to_string(c.duration));
    if (!(f.severity > 0.0 && f.severity <= 1.0)) fail(Errc::ConfigError, "fault severity must be in (0, 1]");
    if (!(f.ramp >= 0.0 && f.ramp <= 1.0)) fail(Errc::ConfigError, "fault ramp must be in [0, 1]");
    if (i > 0 && f.start < sorted[i - 1].end) fail(Errc::ConfigError, "fault intervals overlap");
  }
}

}  // namespace

std::string_view to_string(FaultType t) noexcept { return t == FaultType::AirLeak ? "air_leak" : "oil_leak"; }

FaultType fault_type_from_string(std::string_view s) {
  if (s == "air_leak") return FaultType::AirLeak;
  if (s == "oil_leak") return FaultType::OilLeak;
  fail(Errc::ConfigError, "unknown fault type '" + std::string(s) + "'");
}

Regime regime_of(FaultType t) noexcept { return t == FaultType::AirLeak ? Regime::AirLeak : Regime::OilLeak; }

std::vector<FaultSpec> parse_fault_spec(std::string_view text) {
  std::vector<FaultSpec> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto c1 = item.find(':');
    if (c1 == std::string_view::npos) fail(Errc::ConfigError, "fault '" + std::string(item) + "' lacks a range");
    FaultSpec f;
    f.type = fault_type_from_string(item.substr(0, c1));
    auto rest = item.substr(c1 + 1);
    const auto c2 = rest.find(':');
    const auto range = rest.substr(0, c2);
    const auto dash = range.find('-');
    if (dash == std::string_view::npos) fail(Errc::ConfigError, "fault range must be start-end");
    f.start = parse_size(range.substr(0, dash), "fault start");
    f.end = parse_size(range.substr(dash + 1), "fault end");
    if (c2 != std::string_view::npos) {
      auto tail = rest.substr(c2 + 1);
      const auto c3 = tail.find(':');
      f.severity = parse_real(tail.substr(0, c3), "fault severity");
      if (c3 != std::string_view::npos) f.ramp = parse_real(tail.substr(c3 + 1), "fault ramp");
    }
    out.push_back(f);
  }
  return out;
}

SynthStream synth_generate(const GeneratorConfig& config) {
  validate(config);
  const auto& w = config.waveforms;
  Rng rng(config.seed);
  SynthStream s;
  s.records.resize(config.duration);
  s.truth.assign(config.duration, Regime::Normal);

  std::vector<const FaultSpec*> active(config.duration, nullptr);
  std::vector<double> level(config.duration, 0.0);
  for (const auto& f : config.faults) {
    const double ramp_len = f.ramp * static_cast<double>(f.end - f.start);
    for (std::size_t i = f.start; i < f.end; ++i) {
      active[i] = &f;
      s.truth[i] = regime_of(f.type);
      const double into = static_cast<double>(i - f.start) + 1.0;
      level[i] = f.severity * (ramp_len > 0.0 ? std::min(1.0, into / ramp_len) : 1.0);
    }
  }

  // Start mid-idle so the first charge begins a few seconds in.
  double pressure = w.pressure_low + 0.2 * (w.pressure_high - w.pressure_low);
  bool charging = false;
  std::size_t since_stop = w.purge_seconds;
  std::uint64_t cycle = 0;
  double consumption = w.consumption;
  double stop_pressure = w.pressure_high;

  for (std::size_t i = 0; i < config.duration; ++i) {
    const FaultSpec* f = active[i];
    const double air = f && f->type == FaultType::AirLeak ? level[i] : 0.0;
    const double oil = f && f->type == FaultType::OilLeak ? level[i] : 0.0;
    // Leak drains as much air as normal consumption at full severity.
    const double drain = consumption + air * w.consumption;

    if (charging && pressure >= stop_pressure) {
      charging = false;
      since_stop = 0;
    } else if (!charging && pressure <= w.pressure_low) {
      charging = true;
      ++cycle;
      consumption = w.consumption * std::clamp(1.0 + w.consumption_spread * rng.normal(), 0.5, 1.5);
      const double span = w.pressure_high - w.pressure_low;
      stop_pressure = rng.bernoulli(w.interrupt_probability)
                          ? rng.uniform(w.pressure_low + 0.2 * span, w.pressure_low + 0.7 * span)
                          : w.pressure_high;
    }

    RawRecord& r = s.records[i];
    r.ts = config.start_ts + static_cast<std::int64_t>(i);
    r[Analog::TP2] = pressure + rng.normal(0.0, w.pressure_noise);
    r[Analog::TP3] = pressure - 0.1 + rng.normal(0.0, w.pressure_noise);
    r[Analog::Reservoirs] = pressure - 0.15 + rng.normal(0.0, w.pressure_noise);
    r[Analog::H1] = (charging ? w.h1_charge + 2.0 * air : w.h1_idle) + rng.normal(0.0, 0.05);
    r[Analog::DV_pressure] =
        (!charging && since_stop < w.purge_seconds ? 2.0 : 0.0) + rng.normal(0.0, w.pressure_noise);
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / w.oil_period;
    r[Analog::Oil_temperature] =
        w.oil_mean + w.oil_swing * std::sin(phase) + 8.0 * oil + rng.normal(0.0, w.oil_noise);
    r[Analog::Flowmeter] = w.flow + rng.normal(0.0, 0.5);
    r[Analog::Motor_current] =
        (charging ? w.motor_current_on + 1.5 * air : w.motor_current_off) + rng.normal(0.0, 0.05);

    r.set(Digital::COMP, !charging);
    r.set(Digital::DV_electric, charging);
    r.set(Digital::Towers, cycle % 2 == 1);
    r.set(Digital::MPG, pressure < w.pressure_low + 0.1);
    r.set(Digital::LPS, false);
    r.set(Digital::Pressure_switch, pressure > w.pressure_low + 0.3);
    r.set(Digital::Oil_level, oil > 0.0 && rng.bernoulli(0.5 * oil));
    r.set(Digital::Caudal_impulses, !charging && rng.bernoulli(0.9));

    pressure += charging ? w.charge_rate - drain : -drain;
    ++since_stop;
  }
  return s;
}

std::vector<std::string> perturbed_sensors(FaultType t) {
  if (t == FaultType::OilLeak) return {"Oil_temperature", "Oil_level"};
  // A leak changes cycle timing, which every ones-count and duration sees.
  std::vector<std::string> out{"H1", "Motor_current"};
  for (auto d : kDigitalNames) out.emplace_back(d);
  return out;
}

std::vector<std::string> perturbed_features(FaultType t, const FeatureSchema& schema) {
  const auto sensors = perturbed_sensors(t);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (std::find(sensors.begin(), sensors.end(), schema.sensors()[i]) != sensors.end())
      out.push_back(schema.names()[i]);
  }
  return out;
}

}  // namespace sxai
