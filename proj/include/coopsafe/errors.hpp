#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace coopsafe {

// Raised when an operation is called outside its documented preconditions
// (dimension mismatch, parameter out of range, invalid link index, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Undamped pseudoinverse requested for a rank-deficient matrix.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration detected while building a model (timing law, gains).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario document rejected; path points at the offending field, e.g.
// "task.nominalPath[0]".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace coopsafe
