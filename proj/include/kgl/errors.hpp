#pragma once

#include <stdexcept>
#include <string>

namespace kgl {

// Base of every exception thrown by the library. Derived types map onto
// distinct CLI exit codes (see tools/kgl_cli.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Quadrature or grid resolution would exceed the configured cap.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Kernel values at the truncation boundary are not negligible.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class SingularOriginError : public Error {
 public:
  using Error::Error;
};

class BranchCutError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class NotOnCurveError : public Error {
 public:
  using Error::Error;
};

class TracingError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class RegionError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgl
