#include "gfred/error.hpp"

namespace gfred {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroColumn: return "ZeroColumn";
    case Errc::KnnTooLarge: return "KnnTooLarge";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::FingerprintMismatch: return "FingerprintMismatch";
    case Errc::CorruptFile: return "CorruptFile";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::InsufficientImages: return "InsufficientImages";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool is_config_error(Errc code) {
  return code == Errc::InvalidArgument || code == Errc::KnnTooLarge ||
         code == Errc::ConfigError;
}

bool is_data_error(Errc code) {
  switch (code) {
    case Errc::ZeroColumn:
    case Errc::FingerprintMismatch:
    case Errc::CorruptFile:
    case Errc::VersionMismatch:
    case Errc::BadMagic:
    case Errc::TruncatedFile:
    case Errc::CountMismatch:
    case Errc::ParseError:
    case Errc::InsufficientImages:
    case Errc::IoError:
    case Errc::DimensionMismatch:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace gfred
