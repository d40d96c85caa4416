#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vdsr {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input too small or empty for the requested operation.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Two operands disagree on shape.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its admissible range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceDetected : public Error {
 public:
  DivergenceDetected(std::size_t epoch, std::size_t batch, const std::string& what)
      : Error(what), epoch_(epoch), batch_(batch) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File content does not follow the expected container layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace vdsr
