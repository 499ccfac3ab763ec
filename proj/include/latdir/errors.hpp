#pragma once

#include <stdexcept>
#include <string>

namespace latdir {

/// Malformed arguments or violated preconditions (CLI exit code 2).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested problem exceeds the configured memory cap (CLI exit code 3).
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter outside the supported range of an algorithm.
class Unsupported : public InvalidInput {
 public:
  explicit Unsupported(const std::string& what) : InvalidInput(what) {}
};

/// Not enough data points for a fit.
class InsufficientData : public InvalidInput {
 public:
  explicit InsufficientData(const std::string& what) : InvalidInput(what) {}
};

}  // namespace latdir
