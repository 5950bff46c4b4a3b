#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments violate a documented precondition (shape, range, bit width).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A probability is required to be positive where it is zero.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A marginal constraint cannot be met by any distribution over the support.
class InfeasibleConstraint : public Error {
 public:
  using Error::Error;
};

/// Malformed PGM input. `offset()` is the byte position where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Malformed model file.
class ModelFormatError : public Error {
 public:
  enum class Kind { kVersionMismatch, kDimension, kTruncated, kSyntax };

  ModelFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace ace
