#pragma once

#include <stdexcept>
#include <string>

namespace hotel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (x outside a well, non-positive width, target well not containing source).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two states live in different wells where the operation needs the same one.
class GeometryMismatch : public Error {
 public:
  using Error::Error;
};

/// A level mapping would exceed the permitted number of modes.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Requested spectral resolution exceeds what a grid can represent.
class AliasingError : public Error {
 public:
  using Error::Error;
};

/// Splitting was attempted where the wavefunction does not vanish.
class NodeError : public Error {
 public:
  NodeError(const std::string& what, double position, double relative_magnitude)
      : Error(what), position_(position), relative_magnitude_(relative_magnitude) {}

  double position() const noexcept { return position_; }
  /// |psi(position)| divided by the peak |psi|.
  double relative_magnitude() const noexcept { return relative_magnitude_; }

 private:
  double position_;
  double relative_magnitude_;
};

/// Time stepping lost norm beyond its threshold; a smaller dt usually helps.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, double drift) : Error(what), drift_(drift) {}
  double drift() const noexcept { return drift_; }

 private:
  double drift_;
};

/// A field is too coarsely sampled for the requested azimuthal content.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Petal counting found two azimuthal harmonics of comparable power.
class AmbiguousHarmonicError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hotel
