#pragma once

#include <stdexcept>
#include <string>

namespace eqd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or row.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A parent record appears after (or is) its offspring.
class OrderError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public Error {
 public:
  using Error::Error;
};

/// Mendelian sampling variance vanished; the pedigree is corrupt.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Arguments violate an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A closed-form quantity is undefined for these inputs.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The problem instance has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A size cap of a small-scale routine was exceeded.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped without meeting its tolerances.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace eqd
