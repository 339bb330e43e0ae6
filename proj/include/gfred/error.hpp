#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gfred {

enum class Errc {
  InvalidArgument,
  DimensionMismatch,
  ZeroColumn,
  KnnTooLarge,
  ConvergenceFailure,
  NonFiniteValue,
  FingerprintMismatch,
  CorruptFile,
  VersionMismatch,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  ParseError,
  InsufficientImages,
  IoError,
  ConfigError,
};

std::string_view to_string(Errc code);

/// Configuration-class errors map to CLI exit code 2, data-class errors to 3.
bool is_config_error(Errc code);
bool is_data_error(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gfred
