#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qma {

/// Base of every library error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// A pointwise operation failed at a specific grid point.
class PointError : public Error {
 public:
  PointError(const std::string& what, std::size_t point)
      : Error(what + " at grid point " + std::to_string(point)), point_(point) {}
  std::size_t point() const { return point_; }

 private:
  std::size_t point_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations)
      : Error(what + " after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

/// The iterate left the positive cone: min-eig(G0 + Hess phi) fell below the
/// configured floor.
class PositivityLost : public PointError {
 public:
  using PointError::PointError;
};

class ContinuationStalled : public Error {
 public:
  using Error::Error;
};

class StencilError : public Error {
 public:
  using Error::Error;
};

class AliasingError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace qma
