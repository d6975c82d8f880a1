#pragma once

#include <stdexcept>
#include <string>

namespace stem {

/// Base class for everything the library throws on a contract violation.
/// The three subclasses map one-to-one onto the CLI exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Invalid parameters or inconsistent configuration (exit 2).
class ConfigError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// File could not be read, written or parsed (exit 3).
class IoError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Data is numerically unusable: degenerate moments, no spikes, no root (exit 4).
class NumericError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// Smoothing bandwidth below the grid spacing.
class BandwidthTooSmall : public ConfigError {
public:
  using ConfigError::ConfigError;
};

} // namespace stem
