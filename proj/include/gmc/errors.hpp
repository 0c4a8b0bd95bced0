#pragma once

#include <stdexcept>
#include <string>

namespace gmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point violates its manifold constraint.
class InvalidPointError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a map (e.g. |theta| > 1 for the ball lift).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Minimizing geodesic between two endpoints is not unique or could not be found.
class DegenerateGeodesicError : public Error {
 public:
  using Error::Error;
};

class NotImplementedError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine (root finder, log map) failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DegenerateSeriesError : public Error {
 public:
  using Error::Error;
};

}  // namespace gmc
