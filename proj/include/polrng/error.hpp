#pragma once

#include <stdexcept>
#include <string>

namespace polrng {

enum class ErrorKind {
  InvalidDimension,
  Validation,
  NotPsd,
  Normalization,
  DegenerateSubspace,
  InvalidDistribution,
  InvalidCoherence,
  MissingSetting,
  Budget,
  Io,
};

// All library failures are reported through this type; the CLI maps the
// kind onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace polrng
