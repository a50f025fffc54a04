#pragma once

#include <stdexcept>
#include <string>

namespace stablelab {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters outside their mathematical domain (alpha, beta, scale, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or root-finding failed; carries the best estimate reached.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double best_estimate, double achieved_tolerance)
      : Error(what), best_estimate_(best_estimate), achieved_tolerance_(achieved_tolerance) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double achieved_tolerance() const noexcept { return achieved_tolerance_; }

 private:
  double best_estimate_;
  double achieved_tolerance_;
};

/// Empirical characteristic function too small on the fitting grid.
class GridError : public Error {
 public:
  using Error::Error;
};

/// Continuous-logarithm tracking lost the branch (modulus too small).
class BranchError : public Error {
 public:
  using Error::Error;
};

}  // namespace stablelab
