#pragma once

#include <stdexcept>
#include <string>

namespace casegraph {

/// Base class for all casegraph errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record (bad JSON, missing field, wrong type).
/// The message carries the line/field locus where known.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid data (dangling edge endpoint, duplicate id).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Invalid or out-of-range configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation preconditions on data not met (empty case base, degenerate
/// training set, fold count exceeding question count).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace casegraph
