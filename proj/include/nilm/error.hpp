#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nilm {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Inputs that are well-formed but unusable (empty, misaligned, degenerate).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Tensor shapes that do not compose. `layer()` is the offending layer index, or -1.
class ShapeError : public Error {
 public:
  ShapeError(const std::string& what, int layer = -1)
      : Error(layer < 0 ? what : "layer " + std::to_string(layer) + ": " + what), layer_(layer) {}

  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

/// Optimisation failed (non-finite gradients, unusable training data).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace nilm
