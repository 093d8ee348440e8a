#pragma once

#include <stdexcept>
#include <string>

namespace placenav {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two vectors or stores with incompatible dimensionality were combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The posterior collapsed to all zeros.
class FilterDivergence : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorKind {
  kIo,
  kBadMagic,
  kVersionMismatch,
  kCountInconsistency,
  kAlignmentMismatch,
  kMalformedMetadata,
};

const char* to_string(FormatErrorKind kind);

/// Problems reading or validating an on-disk embedding set or map.
class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  FormatErrorKind kind() const noexcept { return kind_; }

 private:
  FormatErrorKind kind_;
};

}  // namespace placenav
