#pragma once

#include <stdexcept>
#include <string>

namespace qbx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the supported domain of a routine.
struct DomainError : Error {
  using Error::Error;
};

struct OverflowError : Error {
  using Error::Error;
};

// Malformed or inconsistent input geometry.
struct GeometryError : Error {
  using Error::Error;
};

// An adaptive loop hit its cap before meeting its criterion.
struct ResolutionError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct AssociationError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace qbx
