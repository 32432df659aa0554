#pragma once

#include <stdexcept>
#include <string>

namespace noncollapse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A curvature vector left the positive cone.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// Two eigenvalues are too close for a divided difference to be trusted.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// A shift k is too close to (or above) the bottom of a spectrum.
class SingularShift : public Error {
 public:
  using Error::Error;
};

/// Some principal radius became non-positive.
class ConvexityLost : public Error {
 public:
  ConvexityLost(const std::string& what, int index) : Error(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

class PairTooClose : public Error {
 public:
  using Error::Error;
};

class CenterOutside : public Error {
 public:
  using Error::Error;
};

class DiagonalWitness : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class RunTooShort : public Error {
 public:
  using Error::Error;
};

/// Malformed speed names, configs and other user input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace noncollapse
