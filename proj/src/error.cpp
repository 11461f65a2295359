#include "nhqm/error.hpp"

namespace nhqm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::DefectiveOperator: return "DefectiveOperator";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ZeroScale: return "ZeroScale";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::SpectraMismatch: return "SpectraMismatch";
    case ErrorKind::InvalidSize: return "InvalidSize";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace nhqm
