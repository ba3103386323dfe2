#include "sxai/core/error.hpp"

namespace sxai {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidValue: return "InvalidValue";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DegenerateDistribution: return "DegenerateDistribution";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ShapeError: return "ShapeError";
    case Errc::TrainingDiverged: return "TrainingDiverged";
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::MissingFeature: return "MissingFeature";
    case Errc::SchemaError: return "SchemaError";
    case Errc::CorruptInput: return "CorruptInput";
    case Errc::ConfigError: return "ConfigError";
    case Errc::VersionError: return "VersionError";
    case Errc::ChecksumError: return "ChecksumError";
    case Errc::IoError: return "IoError";
    case Errc::Backpressure: return "Backpressure";
  }
  return "Unknown";
}

}  // namespace sxai
