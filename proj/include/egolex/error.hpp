#pragma once

#include <stdexcept>
#include <string>

namespace egolex {

/// Base for all errors raised by the library. The message is user-facing.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data does not satisfy a documented schema or invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A metric cannot be evaluated on the given input (empty ring, degenerate split, ...).
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace egolex
