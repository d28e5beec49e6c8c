#pragma once

#include <stdexcept>
#include <string>

namespace fsad {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance. Carries the best
/// estimate that was reached and an error indicator for it.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double estimate, double indicator)
      : Error(what), estimate_(estimate), indicator_(indicator) {}
  explicit NumericError(const std::string& what) : NumericError(what, 0.0, 0.0) {}

  double estimate() const noexcept { return estimate_; }
  double indicator() const noexcept { return indicator_; }

 private:
  double estimate_;
  double indicator_;
};

/// The chosen method cannot handle the input; another method should be used.
class MethodError : public Error {
 public:
  using Error::Error;
};

/// A discretisation parameter is too coarse for the requested estimate.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Requested combination of inputs is not supported (e.g. non-uniform grid).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsad
