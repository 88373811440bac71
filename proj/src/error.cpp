#include "cxr/error.hpp"

namespace cxr {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::InvalidOrientation: return "InvalidOrientation";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InsufficientPool: return "InsufficientPool";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::ImageSetMismatch: return "ImageSetMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace cxr
