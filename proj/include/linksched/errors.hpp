#pragma once

#include <stdexcept>
#include <string>

namespace linksched {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError -> 2, DataError -> 3, NumericError/DomainError/DimensionError -> 4.

/// Invalid configuration file, unknown key, or bad command-line usage.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Missing, corrupt, or mismatched on-disk artifacts; infeasible generation requests.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values or other numeric breakdown during computation.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public NumericError {
 public:
  explicit DomainError(const std::string& msg) : NumericError(msg) {}
};

/// Shape mismatch between related tensors or vectors.
class DimensionError : public NumericError {
 public:
  explicit DimensionError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace linksched
