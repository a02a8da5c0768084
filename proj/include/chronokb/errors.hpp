#pragma once

#include <stdexcept>
#include <string>

namespace chronokb {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An index was outside the table it addresses. The message names the mode.
class IndexError : public Error {
 public:
  using Error::Error;
};

// The operation needs a time factor the model kind does not have.
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values or option combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input files (datasets, checkpoints, caches).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss or parameter.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace chronokb
