#pragma once

#include <stdexcept>
#include <string>

namespace nsocp {

enum class ErrorKind {
  NonUnitChoice,
  DimensionMismatch,
  SyntaxError,
  UnknownIdentifier,
  VariableOutOfRange,
  DomainError,
  InvalidProblem,
  InfeasiblePoint,
  MissingPerturbations,
  ZeroHatOnBoundary,
  SubsetCapExceeded,
  LineSearchStalled,
  DivergingIterates,
  SubproblemInfeasible,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

  // Optional payload. position is a 0-based character offset for syntax
  // errors, block is the 0-based constraint index for infeasibility.
  long position = -1;
  long block = -1;
  double value = 0.0;
  std::string detail;

 private:
  ErrorKind kind_;
};

}  // namespace nsocp
