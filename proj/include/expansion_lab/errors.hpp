#pragma once

#include <stdexcept>
#include <string>

namespace xlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A word, orbit or sequence is shorter than the requested horizon.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// A word letter does not name a generator, or violates Sequence mode.
class InvalidWord : public Error {
 public:
  using Error::Error;
};

/// |f'(x)| fell below the representable threshold.
class DerivativeDegenerate : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter lies outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition does not hold (e.g. a non-hyperbolic order in strict mode).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A map or system violates one of its structural invariants.
class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : Error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// The image ball cannot be pulled back injectively at this radius.
class ReduceDeltaError : public Error {
 public:
  ReduceDeltaError(const std::string& what, double max_feasible_delta)
      : Error(what), max_feasible_delta_(max_feasible_delta) {}
  double max_feasible_delta() const noexcept { return max_feasible_delta_; }

 private:
  double max_feasible_delta_;
};

/// A point of the domain is not contained in any cover element.
class CoverIncomplete : public Error {
 public:
  CoverIncomplete(const std::string& what, double point) : Error(what), point_(point) {}
  double point() const noexcept { return point_; }

 private:
  double point_;
};

/// An example system contradicts the conditions it was built to satisfy.
class ExampleInvalid : public Error {
 public:
  using Error::Error;
};

/// An iterative search ran out of budget.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace xlab
