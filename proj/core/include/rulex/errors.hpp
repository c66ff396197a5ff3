#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rulex {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed delimiter-separated input. `row` is the 0-based data row.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A rule whose conditions describe an empty interval on some feature.
class VacuousRuleError : public Error {
 public:
  using Error::Error;
};

class DegenerateProblemError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration requested on an instance that is too large.
class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

class InitializationError : public Error {
 public:
  using Error::Error;
};

// An algorithm produced a state that breaks one of its guarantees
// (e.g. an infeasible chromosome inside a population).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rulex
