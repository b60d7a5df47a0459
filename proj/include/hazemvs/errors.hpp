#pragma once

#include <stdexcept>
#include <string>

namespace hazemvs {

/// Bad argument to an operation (non-positive bounds, mismatched sizes, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed data that violates a type invariant (non-orthonormal rotation, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoObservationsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoPixelsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scene description that leaves some camera ray uncovered.
class InvalidSpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hazemvs
