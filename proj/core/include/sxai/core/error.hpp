#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sxai {

/// Failure categories raised across the library. Each maps to one of the
/// named error conditions in the module contracts.
enum class Errc {
  InvalidValue,
  EmptyInput,
  DegenerateDistribution,
  InsufficientData,
  ShapeError,
  TrainingDiverged,
  OutOfOrder,
  MissingFeature,
  SchemaError,
  CorruptInput,
  ConfigError,
  VersionError,
  ChecksumError,
  IoError,
  Backpressure,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace sxai
