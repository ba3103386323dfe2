#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace sxai {

inline constexpr std::size_t kAnalogCount = 8;
inline constexpr std::size_t kDigitalCount = 8;
inline constexpr std::size_t kChannelCount = kAnalogCount + kDigitalCount;

enum class Analog : std::uint8_t {
  TP2,
  TP3,
  H1,
  DV_pressure,
  Reservoirs,
  Oil_temperature,
  Flowmeter,
  Motor_current,
};

enum class Digital : std::uint8_t {
  COMP,
  DV_electric,
  Towers,
  MPG,
  LPS,
  Pressure_switch,
  Oil_level,
  Caudal_impulses,
};

inline constexpr std::array<std::string_view, kAnalogCount> kAnalogNames = {
    "TP2", "TP3", "H1", "DV_pressure", "Reservoirs", "Oil_temperature", "Flowmeter", "Motor_current"};

inline constexpr std::array<std::string_view, kDigitalCount> kDigitalNames = {
    "COMP", "DV_electric", "Towers", "MPG", "LPS", "Pressure_switch", "Oil_level", "Caudal_impulses"};

/// One 1 Hz sample of the compressor sensors.
struct RawRecord {
  /// Epoch seconds, UTC.
  std::int64_t ts = 0;
  std::array<double, kAnalogCount> analog{};
  std::array<std::uint8_t, kDigitalCount> digital{};

  double operator[](Analog a) const { return analog[static_cast<std::size_t>(a)]; }
  double& operator[](Analog a) { return analog[static_cast<std::size_t>(a)]; }
  bool operator[](Digital d) const { return digital[static_cast<std::size_t>(d)] != 0; }
  void set(Digital d, bool on) { digital[static_cast<std::size_t>(d)] = on ? 1 : 0; }

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

}  // namespace sxai
