#pragma once

#include <stdexcept>
#include <string>

namespace sdefi {

// Malformed or inconsistent user input (CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

// A hypothesis of an analysis does not hold for the given system.
class PreconditionError : public InputError {
 public:
  using InputError::InputError;
};

class ConstantCandidateError : public InputError {
 public:
  ConstantCandidateError()
      : InputError("candidate is constant; first integrals must be non-constant") {}
};

// Evaluation at a zero coordinate of an axis carrying a negative exponent.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Floating-point stage failed to converge (CLI exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdefi
