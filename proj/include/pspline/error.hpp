#pragma once

#include <stdexcept>
#include <string>

namespace pspline {

/// Base class for all library errors. `exit_code()` is the process status
/// the command-line tool reports for this category of failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

class InvalidOperator : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Point evaluation requested on a space that is not a RKHS.
class NotAdmissible : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperator : public Error {
 public:
  using Error::Error;
};

/// Numerical failures map to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// The measurements do not see every null-space frequency (rank(P) < N0).
class DegenerateMeasurements : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateSystem : public NumericalError {
 public:
  DegenerateSystem(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace pspline
