#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace masplit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A scalar root solve or iteration did not reach its tolerance in budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Input lies on the medial axis of the constraint set: two or more
/// minimizers at equal distance.
class AmbiguousProjection : public Error {
 public:
  using Error::Error;
};

/// Target value of the determinant constraint is not positive.
class InfeasibleConstraint : public Error {
 public:
  using Error::Error;
};

/// The resolvent (I - d L) of the derivative formula is not invertible
/// by a convergent Neumann series (d*|L| >= 1).
class ContractivityViolated : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// One failed node of a fieldwise operation.
struct NodeFailure {
  int i = 0;
  int j = 0;
  double x = 0.0;
  double y = 0.0;
  std::string kind;
  std::string message;
};

/// Aggregated nodewise failures. The first failure is echoed in what().
class FieldOperationError : public Error {
 public:
  explicit FieldOperationError(std::vector<NodeFailure> failures);

  const std::vector<NodeFailure>& failures() const noexcept { return failures_; }

 private:
  std::vector<NodeFailure> failures_;
};

}  // namespace masplit
