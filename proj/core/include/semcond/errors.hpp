#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semcond {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad syntax, bad graph, bad shapes).
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Exhaustive enumeration was requested above the supported number of labels.
class CapExceeded : public InputError {
 public:
  using InputError::InputError;
};

class CycleError : public InputError {
 public:
  using InputError::InputError;
};

class TreewidthExceeded : public InputError {
 public:
  using InputError::InputError;
};

/// The knowledge has no model, so conditioning on it is undefined.
class UnsatisfiableKnowledge : public InputError {
 public:
  using InputError::InputError;
};

/// A label vector that does not entail the background knowledge.
class InconsistentLabel : public InputError {
 public:
  using InputError::InputError;
};

/// The requested accuracy lies outside the range of a surrogate curve.
class Unattainable : public InputError {
 public:
  using InputError::InputError;
};

/// NaN, divergence or a failed numeric procedure.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace semcond
