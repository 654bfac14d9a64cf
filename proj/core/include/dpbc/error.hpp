#pragma once

#include <stdexcept>
#include <string>

namespace dpbc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands live in different variable spaces, or a vector has the wrong length.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// A parameter lies outside the domain where a formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Missing regions, bad grids, unusable sampling boxes and similar setup problems.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpbc
