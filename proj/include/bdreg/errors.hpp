#pragma once

#include <stdexcept>
#include <string>

namespace bdreg {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Collinear, zero-area or otherwise unusable geometry.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// A configuration value outside its legal range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Maps with mismatched dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message carries file:line.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace bdreg
