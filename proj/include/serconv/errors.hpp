#pragma once

#include <stdexcept>
#include <string>

namespace serconv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A finite summand source ran out before a stage could be filled.
class StreamExhausted : public Error {
 public:
  using Error::Error;
};

/// The valid scale-coupling bound was handed a negative summand.
class NegativeSummand : public Error {
 public:
  using Error::Error;
};

/// An input file does not follow its documented layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A climate value fell outside the range the transform accepts.
class RangeError : public Error {
 public:
  using Error::Error;
};

class MethodUnknown : public Error {
 public:
  using Error::Error;
};

/// The oracle has no analytic answer for the requested series.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// No calibration grid point reached the requested agreement floor.
class NoFeasibleC1 : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration key or value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An output artifact could not be written.
class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace serconv
