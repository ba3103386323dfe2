#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sxai/data/features.hpp"
#include "sxai/data/record.hpp"

namespace sxai {

enum class FaultType : std::uint8_t { AirLeak = 0, OilLeak = 1 };

std::string_view to_string(FaultType t) noexcept;
/// "air_leak" or "oil_leak"; throws Errc::ConfigError otherwise.
FaultType fault_type_from_string(std::string_view s);

struct FaultSpec {
  FaultType type = FaultType::AirLeak;
  /// Record offsets, half-open [start, end).
  std::size_t start = 0;
  std::size_t end = 0;
  double severity = 1.0;
  /// Leading share of the interval over which severity grows linearly from
  /// zero, as a leak develops.
  double ramp = 0.0;

  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

/// "air_leak:20000-23000:1.0,oil_leak:40000-43000:0.8:0.5" with fields
/// type:start-end[:severity[:ramp]]; severity defaults to 1 and ramp to 0.
/// Throws Errc::ConfigError.
std::vector<FaultSpec> parse_fault_spec(std::string_view text);

/// Base waveform parameters, pressures in bar and rates in bar/s.
struct Waveforms {
  double pressure_low = 8.2;
  double pressure_high = 10.2;
  double charge_rate = 0.5;
  double consumption = 0.12;
  /// Relative spread of the per-cycle consumption rate.
  double consumption_spread = 0.1;
  /// Per-cycle probability that charging stops early, somewhere between
  /// the two pressure limits.
  double interrupt_probability = 0.02;
  double pressure_noise = 0.02;
  double h1_idle = 8.8;
  double h1_charge = 0.3;
  double motor_current_on = 5.5;
  double motor_current_off = 0.05;
  double oil_mean = 65.0;
  double oil_swing = 3.0;
  double oil_period = 3600.0;
  double oil_noise = 0.3;
  double flow = 20.0;
  /// Length of the DV pressure purge pulse after the compressor stops.
  std::size_t purge_seconds = 4;

  friend bool operator==(const Waveforms&, const Waveforms&) = default;
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::size_t duration = 50000;
  std::int64_t start_ts = 1640995200;  // 2022-01-01 00:00:00
  Waveforms waveforms;
  std::vector<FaultSpec> faults;

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

enum class Regime : std::uint8_t { Normal = 0, AirLeak = 1, OilLeak = 2 };

/// Generated records and, separately, the ground-truth regime of each one.
struct SynthStream {
  std::vector<RawRecord> records;
  std::vector<Regime> truth;
};

/// Throws Errc::ConfigError for faults outside the duration, empty or
/// overlapping intervals, or severity outside (0, 1].
SynthStream synth_generate(const GeneratorConfig& config);

Regime regime_of(FaultType t) noexcept;

/// Sensors a fault type acts on, directly or through cycle timing.
std::vector<std::string> perturbed_sensors(FaultType t);
/// Feature names of `schema` that the fault type is declared to perturb.
std::vector<std::string> perturbed_features(FaultType t, const FeatureSchema& schema);

}  // namespace sxai
