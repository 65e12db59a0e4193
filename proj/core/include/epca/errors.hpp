#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace epca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mean parameter fell outside the family's mean domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// One or more features have (near) zero noise variance and cannot be
/// homogenized.
class DegenerateFeatureError : public Error {
 public:
  DegenerateFeatureError(const std::string& what, std::vector<std::size_t> columns)
      : Error(what), columns_(std::move(columns)) {}

  const std::vector<std::size_t>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

/// Malformed input data: shapes, invalid entries, bad configuration values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A regularized covariance could not be factored.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Violated internal consistency between pipeline stages.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// File content could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// File-system level failure (missing file, unwritable directory).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace epca
