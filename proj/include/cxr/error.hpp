#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cxr {

enum class ErrorKind {
  IoFailure,
  MalformedHeader,
  UnsupportedDatatype,
  DimensionMismatch,
  GeometryMismatch,
  InvalidOrientation,
  InvariantViolation,
  DegeneratePolygon,
  SchemaError,
  InsufficientPool,
  InsufficientSamples,
  ImageSetMismatch,
  ConfigError,
};

std::string_view error_name(ErrorKind kind);

// Domain error carrying the kind name the CLI reports on exit status 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace cxr
