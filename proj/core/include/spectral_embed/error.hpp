#pragma once

#include <stdexcept>
#include <string>

namespace spectral_embed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or mesh topology problem; the message carries the location.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not reach its tolerance inside the iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace spectral_embed
