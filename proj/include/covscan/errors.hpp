#pragma once

#include <stdexcept>
#include <string>

namespace covscan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied values does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Kernel derivative order outside the supported range (0..4 per argument).
class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

/// A quotient in a coefficient expression has a zero denominator at this lambda.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, double lambda) : Error(what), lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

/// Eigen/Cholesky/SVD decomposition could not be carried out.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

/// No sign change found where a root was expected.
class BracketNotFound : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace covscan
