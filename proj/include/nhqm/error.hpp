#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhqm {

enum class ErrorKind {
  NonFinite,
  NonSquare,
  DimensionMismatch,
  DegenerateSpectrum,
  DefectiveOperator,
  SingularMatrix,
  SingularSystem,
  NoConvergence,
  ZeroScale,
  ZeroVector,
  IndexOutOfRange,
  NonPositiveCoefficient,
  NotNormalized,
  SpectraMismatch,
  InvalidSize,
  ParseError,
  SchemaMismatch,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the sweep
// driver in particular) can report it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhqm
