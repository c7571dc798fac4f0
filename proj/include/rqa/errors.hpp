#pragma once

#include <stdexcept>
#include <string>

namespace rqa {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A masked reduction was asked to operate with no unmasked position.
class EmptySupportError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class SpanResolutionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public Error {
 public:
  using Error::Error;
};

class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Invalid combination of command-line inputs (e.g. a T/F file passed with --task mc).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace rqa
