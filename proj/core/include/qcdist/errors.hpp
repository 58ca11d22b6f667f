#pragma once

#include <stdexcept>
#include <string>

namespace qcdist {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A point sits on an interface circle where the Beltrami coefficient is undefined.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// The hexagonal lattice search cannot place the requested disks with density above 1/2.
class PackingError : public Error {
 public:
  using Error::Error;
};

/// The normalization equation for a level has no admissible root.
/// `required_multiplier` estimates the factor by which the level's disk
/// count (or the product m_1...m_N) has to grow for a root to exist.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double required_multiplier)
      : Error(what), required_multiplier_(required_multiplier) {}

  double required_multiplier() const noexcept { return required_multiplier_; }

 private:
  double required_multiplier_;
};

/// An iterative numerical procedure did not reach its tolerance.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// A configuration document failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcdist
