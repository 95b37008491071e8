#pragma once

#include <stdexcept>
#include <string>

namespace rankagg {

// Caller passed something malformed (bad ranking, bad matrix, bad file
// contents). Maps to CLI exit code 2.
class invalid_input_error : public std::invalid_argument {
 public:
  explicit invalid_input_error(const std::string& what)
      : std::invalid_argument(what) {}
};

// Parameter outside its documented domain (epsilon <= 0, kappa out of
// range, ...). Maps to CLI exit code 2.
class invalid_parameter_error : public std::invalid_argument {
 public:
  explicit invalid_parameter_error(const std::string& what)
      : std::invalid_argument(what) {}
};

// A ledger spend would exceed the declared total budget. Maps to CLI
// exit code 3.
class budget_exhausted_error : public std::runtime_error {
 public:
  explicit budget_exhausted_error(const std::string& what)
      : std::runtime_error(what) {}
};

// A precondition of an operation was violated by the caller (e.g. the
// bounded-instance solver was handed an unbounded instance).
class contract_violation_error : public std::logic_error {
 public:
  explicit contract_violation_error(const std::string& what)
      : std::logic_error(what) {}
};

// Instance too large for an exact routine that is guarded by a size cap.
class unsupported_size_error : public std::runtime_error {
 public:
  explicit unsupported_size_error(const std::string& what)
      : std::runtime_error(what) {}
};

// File could not be read or written. Maps to CLI exit code 4.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rankagg
