// errors.hpp - exception types thrown by the qig library

#pragma once

#include <stdexcept>
#include <string>

namespace qig {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// A matrix fails the manifold membership test (trace, Hermiticity or the
// eigenvalue floor).
class OutOfManifold : public Error {
 public:
  using Error::Error;
};

// A tangent payload fails the invariant of its representation.
class InvalidTangent : public Error {
 public:
  using Error::Error;
};

class BaseMismatch : public Error {
 public:
  using Error::Error;
};

// Singular or indefinite matrices where invertibility is required.
class NumericalDegeneracy : public Error {
 public:
  using Error::Error;
};

class InversionFailure : public Error {
 public:
  InversionFailure(const std::string& what, double final_residual)
      : Error(what), final_residual_(final_residual) {}
  double final_residual() const noexcept { return final_residual_; }

 private:
  double final_residual_;
};

class UnsupportedTransport : public Error {
 public:
  using Error::Error;
};

}  // namespace qig
