#pragma once

#include <stdexcept>
#include <string>

namespace omit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: invalid parameter values, unknown config keys, malformed scan specs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A computation could not produce a trustworthy number.
class NumericalError : public Error {
 public:
  enum class Kind { singular, nonfinite, branch_unavailable, inconsistent, no_convergence };

  NumericalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace omit
