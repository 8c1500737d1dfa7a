#pragma once

#include <stdexcept>
#include <string>

namespace rfda {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometric input: off-manifold point, non-tangent vector,
/// or a matrix-function failure on the SPD manifold.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Logarithm requested at (or too close to) the cut locus.
class AntipodalError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Tangent vectors with different base points fed to a pointwise operation.
class BaseMismatchError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Orthonormal frame construction failed (Gram-Schmidt breakdown).
class FrameError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver exhausted its budget without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Point cloud too dispersed for a well-posed mean on the sphere.
class DispersedDataError : public Error {
 public:
  using Error::Error;
};

/// Division guard tripped on a (near-)zero eigenvalue.
class DegenerateEigenvalueError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (CSV/JSON schema violation).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfda
